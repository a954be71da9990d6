use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fields::{induced_action, lift};
use crate::groups::{GroupElement, Rotation3};
use crate::random;
use crate::transforms::so3_ft_forward;

fn s2(b: usize) -> QuadratureGrid {
    QuadratureGrid::new(Space::S2, b).unwrap()
}

fn rand_kernel(rng: &mut ChaCha8Rng, m1: i64, m2: i64, b: usize, co: usize, ci: usize) -> SparseKernelSpec {
    SparseKernelSpec::from_fn(m1, m2, b, co, ci, |_, _, _| random::complex(rng)).unwrap()
}

fn rel(a: &[Vec<C>], b: &[Vec<C>]) -> f64 {
    let (mut n, mut d) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        for (u, v) in x.iter().zip(y) {
            n += (u - v).norm_sqr();
            d += v.norm_sqr();
        }
    }
    (n / d.max(1e-300)).sqrt()
}

fn flat(c: &ColumnSpectrum) -> Vec<C> {
    c.coeffs.iter().flatten().flatten().copied().collect()
}

#[test]
fn zero_kernel_gives_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let a = random::column(&mut rng, 5, 1, 2);
    let k = SparseKernelSpec::zeros(1, -2, 5, 3, 2).unwrap();
    let out = conv_column(&a, &k).unwrap();
    assert!(flat(&out).iter().all(|z| z.norm() == 0.0));
    assert_eq!(k.dimension(), 3);
}

#[test]
fn sparsity_mismatch_is_an_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let a = random::column(&mut rng, 5, 1, 1);
    let k = SparseKernelSpec::zeros(0, 0, 5, 1, 1).unwrap();
    assert!(matches!(conv_column(&a, &k), Err(Error::SparsityMismatch { expected: 0, found: 1 })));
    assert!(matches!(
        conv_spectral(&a.to_blocks(), &k),
        Err(Error::SparsityMismatch { expected: 0, found: 1 })
    ));
}

#[test]
fn identity_coefficients_found_by_solving() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let b = 6;
    for m in -2i64..=2 {
        let a = random::column(&mut rng, b, m, 1);
        // Least-squares solve of c^l · a^l = a^l for each degree.
        let k = SparseKernelSpec::from_fn(m, m, b, 1, 1, |_, _, l| {
            let num: C = a.coeffs[0][l].iter().map(|v| v.conj() * v).sum();
            let den: f64 = a.coeffs[0][l].iter().map(|v| v.norm_sqr()).sum();
            num / den
        })
        .unwrap();
        let out = conv_column(&a, &k).unwrap();
        for (x, y) in flat(&out).iter().zip(flat(&a)) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}

#[test]
fn scalar_kernel_is_isotropic() {
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    let k = rand_kernel(&mut rng, 0, 0, 5, 1, 1);
    let sp = kernel_to_spatial(&k).unwrap();
    let n = sp.grid.axis_len();
    for block in sp.samples[0].chunks(n * n) {
        assert!(block.iter().all(|v| (v - block[0]).norm() < 1e-13));
    }
}

#[test]
fn spatial_kernel_legendre_and_round_trip() {
    for l in 0..=3usize {
        let k = SparseKernelSpec::from_fn(0, 0, 4, 1, 1, |_, _, t| if t == l { C::new(1.0, 0.0) } else { ZERO }).unwrap();
        let sp = kernel_to_spatial(&k).unwrap();
        for (v, n) in sp.samples[0].iter().zip(sp.grid.nodes()) {
            let x = n.beta.cos();
            let p = [1.0, x, 1.5 * x * x - 0.5, 2.5 * x * x * x - 1.5 * x][l];
            assert!((v - p).norm() < 1e-13);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let k = rand_kernel(&mut rng, -1, 2, 6, 1, 1);
    let sp = kernel_to_spatial(&k).unwrap();
    let f = so3_ft_forward(&sp.grid, &sp.samples).unwrap();
    for l in 0..6 {
        for m in -(l as i64)..=l as i64 {
            for n in -(l as i64)..=l as i64 {
                let e = if (m, n) == (-1, 2) { k.coeff(0, 0, l) / (2 * l + 1) as f64 } else { ZERO };
                assert!((f.get(0, l, m, n) - e).norm() < 1e-12);
            }
        }
    }
    let z = kernel_to_spatial(&SparseKernelSpec::zeros(1, 1, 3, 1, 1).unwrap()).unwrap();
    assert!(z.samples[0].iter().all(|v| v.norm() == 0.0));
}

#[test]
fn spectral_matches_spatial_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(56);
    let b = 4;
    for (m1, m2) in [(0, 0), (1, -1), (-2, 1), (0, 2), (1, 1)] {
        let f = TensorField::from_spectrum(&random::column(&mut rng, b, m1, 2), &s2(b)).unwrap();
        let k = rand_kernel(&mut rng, m1, m2, b, 2, 2);
        let spectral = conv_field(&f, &k).unwrap();
        let oracle = conv_spatial_oracle(&f, &k).unwrap();
        // Fit the single global scalar and confirm it is one.
        let num: C = spectral.samples.iter().flatten().zip(oracle.samples.iter().flatten()).map(|(s, o)| s.conj() * o).sum();
        let den: f64 = spectral.samples.iter().flatten().map(|s| s.norm_sqr()).sum();
        let scale = num / den;
        assert!((scale - 1.0).norm() < 1e-10, "({m1},{m2}) scale {scale}");
        assert!(rel(&oracle.samples, &spectral.samples) < 1e-10);
    }
}

#[test]
fn oracle_of_zero_field_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    let f = TensorField::zeros(s2(3), 1, 1);
    let k = rand_kernel(&mut rng, 1, 0, 3, 1, 1);
    assert!(conv_spatial_oracle(&f, &k).unwrap().samples[0].iter().all(|v| v.norm() == 0.0));
}

#[test]
fn equivariance_under_random_rotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(58);
    let b = 8;
    for (m1, m2) in [(0, 0), (2, -1), (-1, 1)] {
        let f = TensorField::from_spectrum(&random::column(&mut rng, b, m1, 2), &s2(b)).unwrap();
        let k = rand_kernel(&mut rng, m1, m2, b, 1, 2);
        for _ in 0..3 {
            let g = GroupElement::So3(random::rotation(&mut rng));
            let a = induced_action(&g, &conv_field(&f, &k).unwrap()).unwrap();
            let c = conv_field(&induced_action(&g, &f).unwrap(), &k).unwrap();
            assert!(rel(&c.samples, &a.samples) < 1e-8);
        }
    }
}

#[test]
fn dense_kernel_reduces_to_sparse() {
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    let b = 6;
    let (m1, m2) = (1i64, -2i64);
    let f = TensorField::from_spectrum(&random::column(&mut rng, b, m1, 2), &s2(b)).unwrap();
    let fhat = lift(&f).spectrum().unwrap();
    let dense: DenseKernel = (0..2)
        .map(|_| {
            (0..2)
                .map(|_| (0..b).map(|l| DMatrix::from_fn(2 * l + 1, 2 * l + 1, |_, _| random::complex(&mut rng))).collect())
                .collect()
        })
        .collect();
    let k = SparseKernelSpec::from_fn(m1, m2, b, 2, 2, |o, i, l| {
        let li = l as i64;
        dense[o][i][l][((m1 + li) as usize, (m2 + li) as usize)]
    })
    .unwrap();
    let full = conv_dense(&fhat, &dense).unwrap().column(m2).unwrap();
    let sparse = conv_spectral(&fhat, &k).unwrap().column(m2).unwrap();
    let d = flat(&full).iter().zip(flat(&sparse)).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(d < 1e-12, "{d}");
}

#[test]
fn single_coefficient_kernels_are_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let b = 6;
    for (m1, m2) in [(0, 0), (1, 2), (-2, 0)] {
        let a = random::column(&mut rng, b, m1, 1);
        let k0 = SparseKernelSpec::zeros(m1, m2, b, 1, 1).unwrap();
        let cols: Vec<Vec<C>> = (k0.min_degree()..b)
            .map(|l| {
                let k = SparseKernelSpec::from_fn(m1, m2, b, 1, 1, |_, _, t| if t == l { C::new(1.0, 0.0) } else { ZERO }).unwrap();
                flat(&conv_column(&a, &k).unwrap())
            })
            .collect();
        let m = DMatrix::from_fn(cols[0].len(), cols.len(), |r, c| cols[c][r]);
        let sv = m.singular_values();
        assert_eq!(sv.len(), k0.dimension());
        assert!(sv.min() > 1e-8);
    }
}

#[test]
fn vjp_adjoint_and_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let b = 5;
    let a = random::column(&mut rng, b, 1, 2);
    let k = rand_kernel(&mut rng, 1, -1, b, 3, 2);
    let u = random::column(&mut rng, b, -1, 3);
    let y = conv_column(&a, &k).unwrap();
    let (ga, gk) = conv_vjp(&a, &k, &u).unwrap();
    let ip = |x: &[C], y: &[C]| x.iter().zip(y).map(|(p, q)| (p.conj() * q).re).sum::<f64>();
    let lhs = ip(&flat(&u), &flat(&y));
    let rhs = ip(&flat(&ga), &flat(&a));
    assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    let kc: Vec<C> = k.coeffs.iter().flatten().flatten().copied().collect();
    let gc: Vec<C> = gk.coeffs.iter().flatten().flatten().copied().collect();
    assert!((lhs - ip(&gc, &kc)).abs() < 1e-12 * lhs.abs().max(1.0));

    let zero = ColumnSpectrum::zeros(b, -1, 3);
    let (za, zk) = conv_vjp(&a, &k, &zero).unwrap();
    assert!(flat(&za).iter().chain(zk.coeffs.iter().flatten().flatten()).all(|z| z.norm() == 0.0));

    // L = ½‖conv(a, c)‖², gradient = vjp with u = y.
    let loss = |a: &ColumnSpectrum, k: &SparseKernelSpec| 0.5 * flat(&conv_column(a, k).unwrap()).iter().map(|z| z.norm_sqr()).sum::<f64>();
    let (ga, gk) = conv_vjp(&a, &k, &y).unwrap();
    let da = random::column(&mut rng, b, 1, 2);
    let dk = rand_kernel(&mut rng, 1, -1, b, 3, 2);
    let step = |s: f64| {
        let mut a2 = a.clone();
        for (x, d) in a2.coeffs.iter_mut().flatten().flatten().zip(da.coeffs.iter().flatten().flatten()) {
            *x += d * s;
        }
        let mut k2 = k.clone();
        for (x, d) in k2.coeffs.iter_mut().flatten().flatten().zip(dk.coeffs.iter().flatten().flatten()) {
            *x += d * s;
        }
        loss(&a2, &k2)
    };
    let h = 1e-5;
    let fd = (step(h) - step(-h)) / (2.0 * h);
    let flat_k = |k: &SparseKernelSpec| k.coeffs.iter().flatten().flatten().copied().collect::<Vec<C>>();
    let an = ip(&flat(&ga), &flat(&da)) + ip(&flat_k(&gk), &flat_k(&dk));
    assert!((fd - an).abs() <= 1e-8 * an.abs(), "fd {fd} analytic {an}");
}

#[test]
fn conjugate_partner_commutes_with_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let b = 5;
    let f = TensorField::from_spectrum(&random::column(&mut rng, b, 1, 1), &s2(b)).unwrap();
    let k = rand_kernel(&mut rng, 1, 2, b, 1, 1);
    let conj_f = TensorField::new(f.grid.clone(), crate::fields::FieldType::so2(-1), vec![f.samples[0].iter().map(|z| z.conj()).collect()]).unwrap();
    let a = conv_field(&conj_f, &k.conjugate_partner()).unwrap();
    let c = conv_field(&f, &k).unwrap();
    let cc: Vec<Vec<C>> = vec![c.samples[0].iter().map(|z| z.conj()).collect()];
    assert!(rel(&a.samples, &cc) < 1e-12);
}

#[test]
fn kernel_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    let k = rand_kernel(&mut rng, -1, 0, 4, 2, 3);
    let s = k.to_json().unwrap();
    assert!(s.contains("\"B\":4"));
    assert_eq!(SparseKernelSpec::from_json(&s).unwrap(), k);
    let bad = s.replace("\"m_in\":-1", "\"m_in\":7");
    assert!(SparseKernelSpec::from_json(&bad).is_err());
    let _ = Rotation3::identity();
}
