use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fields::induced_action;
use crate::groups::{GroupElement, Rotation3};
use crate::harmonics::{real_wigner, wigner_D};
use crate::random;

fn s2(b: usize) -> QuadratureGrid {
    QuadratureGrid::new(Space::S2, b).unwrap()
}

fn field(rng: &mut ChaCha8Rng, b: usize, k: i64, ch: usize) -> TensorField {
    TensorField::from_spectrum(&random::column(rng, b, k, ch), &s2(b)).unwrap()
}

fn rel(a: &[Vec<C>], b: &[Vec<C>]) -> f64 {
    let (mut n, mut d) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        for (u, v) in x.iter().zip(y) {
            n += (u - v).norm_sqr();
            d += v.norm_sqr();
        }
    }
    if d < 1e-24 { n.sqrt() } else { (n / d).sqrt() }
}

fn relu() -> ActivationSpec {
    ActivationSpec::new(ActivationKind::Relu)
}

#[test]
fn lift_sum_of_two_orders() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let f0 = field(&mut rng, 4, 0, 1);
    let f1 = field(&mut rng, 4, 1, 1);
    assert_eq!(lift_sum(std::slice::from_ref(&f0)).unwrap(), lift(&f0));
    let l = lift_sum(&[f0.clone(), f1.clone()]).unwrap();
    let na = l.grid.axis_len();
    for (i, n) in l.grid.nodes().iter().enumerate() {
        let x = i / na;
        let e = f0.samples[0][x] + C::from_polar(1.0, -n.gamma) * f1.samples[0][x];
        assert!((l.samples[0][i] - e).norm() < 1e-14);
    }
    let other = field(&mut rng, 5, 0, 1);
    assert!(lift_sum(&[f0, other]).is_err());
}

#[test]
fn lift_sum_intertwines() {
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let fs: Vec<TensorField> = (-1..=1).map(|k| field(&mut rng, 5, k, 1)).collect();
    let g = GroupElement::So3(random::rotation(&mut rng));
    let moved: Vec<TensorField> = fs.iter().map(|f| induced_action(&g, f).unwrap()).collect();
    let a = lift_sum(&moved).unwrap();
    let b = crate::fields::regular_action(&g, &lift_sum(&fs).unwrap()).unwrap();
    assert!(rel(&a.samples, &b.samples) < 1e-9);
}

#[test]
fn activation_trivial_cases_and_shift_commutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let grid = QuadratureGrid::new(Space::SO3, 4).unwrap();
    let pos: Vec<C> = (0..grid.len()).map(|_| C::new(rng.random_range(0.1..2.0), 0.0)).collect();
    let g = GroupFunction::new(grid.clone(), vec![pos.clone()]).unwrap();
    assert_eq!(activate(&g, &relu()).unwrap().samples[0], pos);
    let neg = GroupFunction::new(grid.clone(), vec![pos.iter().map(|z| -z).collect()]).unwrap();
    assert!(activate(&neg, &relu()).unwrap().samples[0].iter().all(|z| z.norm() == 0.0));

    let l = GroupFunction::new(grid, vec![(0..pos.len()).map(|_| random::complex(&mut rng)).collect()]).unwrap();
    for kind in [ActivationKind::Relu, ActivationKind::Gelu, ActivationKind::Tanh] {
        let spec = ActivationSpec::new(kind);
        for (sa, sg) in [(1, 0), (3, 5), (-2, 7)] {
            let a = activate(&l.shift_aligned(sa, sg), &spec).unwrap();
            let b = activate(&l, &spec).unwrap().shift_aligned(sa, sg);
            assert_eq!(a.samples, b.samples);
        }
    }
}

#[test]
fn column_projection_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(74);
    for k in -2i64..=2 {
        let f = field(&mut rng, 5, k, 2);
        let up = lift(&f);
        assert!(rel(&project_column(&up, k).unwrap().samples, &f.samples) < 1e-14);
        let other = project_column(&up, k + 1).unwrap();
        assert!(other.samples.iter().flatten().all(|z| z.norm() < 1e-12));
    }
}

#[test]
fn delta_kernel_reproduces_column_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(75);
    let fs: Vec<TensorField> = (-2..=2).map(|k| field(&mut rng, 5, k, 1)).collect();
    let l = lift_sum(&fs).unwrap();
    for m in -2i64..=2 {
        let kern = delta_kernel(&l.grid, m).unwrap();
        let a = project_kernel(&l, &kern, m).unwrap();
        let b = project_column(&l, m).unwrap();
        assert!(rel(&a.samples, &b.samples) < 1e-10, "m={m}");
    }
    let zero = GroupFunction::new(l.grid.clone(), vec![vec![C::new(0.0, 0.0); l.grid.len()]]).unwrap();
    assert!(project_kernel(&l, &zero, 1).unwrap().samples[0].iter().all(|z| z.norm() == 0.0));
    let bad = lift_sum(&fs[1..3]).unwrap();
    assert!(matches!(project_kernel(&l, &bad, 0), Err(Error::NotMackey { .. })));
}

#[test]
fn kernel_projection_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(76);
    let b = 8;
    let fs: Vec<TensorField> = (-1..=1).map(|k| field(&mut rng, b, k, 1)).collect();
    let m = 1;
    let grid = QuadratureGrid::new(Space::SO3, b).unwrap();
    let kern = GroupFunction::from_spectrum(&random::column(&mut rng, b, m, 1).to_blocks(), &grid).unwrap();
    for _ in 0..3 {
        let g = GroupElement::So3(random::rotation(&mut rng));
        let moved: Vec<TensorField> = fs.iter().map(|f| induced_action(&g, f).unwrap()).collect();
        let a = project_kernel(&lift_sum(&moved).unwrap(), &kern, m).unwrap();
        let c = induced_action(&g, &project_kernel(&lift_sum(&fs).unwrap(), &kern, m).unwrap()).unwrap();
        assert!(rel(&a.samples, &c.samples) < 1e-8);
    }
}

#[test]
fn relu_on_positive_scalar_is_identity() {
    let b = 4;
    let grid = s2(b);
    let mut spec = ColumnSpectrum::zeros(b, 0, 1);
    spec.coeffs[0][0][0] = C::new(3.0, 0.0);
    spec.coeffs[0][1][1] = C::new(0.2, 0.0);
    let f = TensorField::from_spectrum(&spec, &grid).unwrap();
    assert!(f.samples[0].iter().all(|z| z.re > 0.0));
    let out = nonlinearity(std::slice::from_ref(&f), &relu(), &[0], NonlinOptions::default()).unwrap();
    assert!(rel(&out[0].samples, &f.samples) < 1e-12);
}

#[test]
fn identity_activation_is_exactly_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let b = 6;
    let fs: Vec<TensorField> = (-1..=1).map(|k| field(&mut rng, b, k, 1)).collect();
    let spec = ActivationSpec::new(ActivationKind::Identity);
    let g = GroupElement::So3(random::rotation(&mut rng));
    let orders = [-1, 0, 1, 2];
    let moved: Vec<TensorField> = fs.iter().map(|f| induced_action(&g, f).unwrap()).collect();
    let a = nonlinearity(&moved, &spec, &orders, NonlinOptions::default()).unwrap();
    let c = nonlinearity(&fs, &spec, &orders, NonlinOptions::default()).unwrap();
    for (x, y) in a.iter().zip(&c) {
        let y = induced_action(&g, y).unwrap();
        assert!(rel(&x.samples, &y.samples) < 1e-10);
    }
}

#[test]
fn grid_aligned_rotations_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    let b = 4;
    let fs: Vec<TensorField> = (-1..=1).map(|k| field(&mut rng, b, k, 1)).collect();
    let step = std::f64::consts::PI / b as f64;
    let orders = [-1, 0, 1];
    let base = nonlinearity(&fs, &relu(), &orders, NonlinOptions::default()).unwrap();
    for s in 1..4 {
        let g = GroupElement::So3(Rotation3::rz(s as f64 * step));
        let moved: Vec<TensorField> = fs.iter().map(|f| induced_action(&g, f).unwrap()).collect();
        let a = nonlinearity(&moved, &relu(), &orders, NonlinOptions::default()).unwrap();
        for (x, y) in a.iter().zip(&base) {
            let y = induced_action(&g, y).unwrap();
            let e = x.samples[0].iter().zip(&y.samples[0]).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            assert!(e < 1e-12, "{e}");
        }
    }
}

#[test]
fn oversampling_reduces_equivariance_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(79);
    let b = 4;
    let fs: Vec<TensorField> = (-1..=1).map(|k| field(&mut rng, b, k, 1)).collect();
    let gs: Vec<GroupElement> = (0..3).map(|_| GroupElement::So3(random::rotation(&mut rng))).collect();
    let orders = [-1, 0, 1];
    let mut errs = Vec::new();
    for os in [1, 2, 4] {
        let opts = NonlinOptions { oversample: os };
        let base = nonlinearity(&fs, &relu(), &orders, opts).unwrap();
        let mut worst: f64 = 0.0;
        for g in &gs {
            let moved: Vec<TensorField> = fs.iter().map(|f| induced_action(g, f).unwrap()).collect();
            let a = nonlinearity(&moved, &relu(), &orders, opts).unwrap();
            for (x, y) in a.iter().zip(&base) {
                worst = worst.max(rel(&x.samples, &induced_action(g, y).unwrap().samples));
            }
        }
        errs.push(worst);
    }
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

fn random_features(rng: &mut ChaCha8Rng, lmax: usize, ch: usize, scale: f64) -> SphereFeatures {
    (0..=lmax)
        .map(|l| (l, DMatrix::from_fn(2 * l + 1, ch, |_, _| scale * rng.random_range(-1.0..1.0))))
        .collect()
}

fn rotate_features(f: &SphereFeatures, r: &Rotation3) -> SphereFeatures {
    f.iter().map(|(&l, b)| (l, real_wigner(&wigner_D(l, r)) * b)).collect()
}

fn feat_diff(a: &SphereFeatures, b: &SphereFeatures) -> f64 {
    let n: f64 = a.iter().map(|(l, x)| (x - &b[l]).norm_squared()).sum();
    let d: f64 = b.values().map(|x| x.norm_squared()).sum();
    (n / d).sqrt()
}

#[test]
fn point_nonlin_identity_path() {
    let mut f = SphereFeatures::new();
    f.insert(0, DMatrix::from_element(1, 2, 0.7));
    let out = point_sphere_nonlin(&[f.clone()], &relu(), &[0], PointNonlinOptions::default()).unwrap();
    assert!((&out[0][&0] - &f[&0]).abs().max() < 1e-10);
}

#[test]
fn point_nonlin_matches_group_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let f = random_features(&mut rng, 2, 3, 0.8);
    let opts = PointNonlinOptions { sphere_bandwidth: 4, oversample: 2 };
    for spec in [relu(), ActivationSpec::new(ActivationKind::Gelu)] {
        let a = point_sphere_nonlin(&[f.clone()], &spec, &[0, 1, 2, 3], opts).unwrap();
        let b = point_nonlin_via_group(&f, &spec, &[0, 1, 2, 3], opts).unwrap();
        assert!(feat_diff(&a[0], &b) < 1e-10);
    }
}

#[test]
fn point_nonlin_is_equivariant_with_gelu() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let spec = ActivationSpec::new(ActivationKind::Gelu);
    let opts = PointNonlinOptions::default();
    for _ in 0..5 {
        let f = random_features(&mut rng, 2, 2, 0.5);
        let r = random::rotation(&mut rng);
        let a = point_sphere_nonlin(&[rotate_features(&f, &r)], &spec, &[0, 1, 2], opts).unwrap();
        let b = rotate_features(&point_sphere_nonlin(&[f], &spec, &[0, 1, 2], opts).unwrap()[0], &r);
        assert!(feat_diff(&a[0], &b) < 1e-8, "{}", feat_diff(&a[0], &b));
    }
}

#[test]
fn mlp_across_channels() {
    let mlp = Mlp {
        layers: vec![
            DenseLayer { weights: vec![vec![1.0, -1.0], vec![0.5, 0.5], vec![0.0, 2.0]], bias: vec![0.1, 0.0, -0.2] },
            DenseLayer { weights: vec![vec![1.0, 1.0, 1.0]], bias: vec![0.0] },
        ],
        hidden: ActivationKind::Gelu,
    };
    let spec = ActivationSpec::mlp(mlp);
    let s = spec.to_json().unwrap();
    assert_eq!(ActivationSpec::from_json(&s).unwrap(), spec);
    let mut rng = ChaCha8Rng::seed_from_u64(82);
    let f = random_features(&mut rng, 1, 2, 0.5);
    let out = point_sphere_nonlin(&[f.clone()], &spec, &[0, 1], PointNonlinOptions::default()).unwrap();
    assert_eq!(out[0][&1].shape(), (3, 1));
    let bad = random_features(&mut rng, 1, 3, 0.5);
    assert!(point_sphere_nonlin(&[bad], &spec, &[0], PointNonlinOptions::default()).is_err());
    assert!(ActivationSpec::from_json(r#"{"kind":"per_point_mlp"}"#).is_err());
    assert_eq!(ActivationSpec::from_json(r#"{"kind":"tanh"}"#).unwrap().kind, ActivationKind::Tanh);
}

