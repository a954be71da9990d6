use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::{DMatrix, Vector2, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{CheckDef, Suite, SuiteConfig};
use crate::conv::{conv_dense, conv_field, conv_spatial_oracle, conv_spectral, conv_column, conv_vjp, DenseKernel, SparseKernelSpec};
use crate::error::Result;
use crate::fields::{induced_action, lift, TensorField};
use crate::groups::{GroupElement, QuadratureGrid, Rotation3, Space, SpherePoint};
use crate::harmonics::{clebsch_gordan, real_wigner, wigner_D, wigner_d};
use crate::nonlin::{
    delta_kernel, lift_sum, nonlinearity, point_nonlin_via_group, point_sphere_nonlin, project_column, project_kernel,
    ActivationKind, ActivationSpec, NonlinOptions, PointNonlinOptions, SphereFeatures,
};
use crate::random;
use crate::se_kernels::{
    se3_layer, tfn_point_conv, PointCloud, RadialProfile, SE2KernelBasis, SE3KernelBasis, Se3LayerSpec, SelfInteraction,
    TfnConv, TfnTerm,
};
use crate::transforms::{sht_analyze, sht_synthesize, so3_ft_forward, so3_synthesize, ColumnSpectrum};

type C = Complex64;

pub(super) fn registry(suite: Suite, cfg: &SuiteConfig) -> Vec<CheckDef> {
    let p = |n: &str| format!("{suite}.{n}");
    match suite {
        Suite::Transforms => vec![
            CheckDef::new(p("sht_round_trip"), 1e-10, sht_round_trip),
            CheckDef::new(p("sht_parseval"), 1e-10, sht_parseval),
            CheckDef::new(p("so3_round_trip"), 1e-10, so3_round_trip),
            CheckDef::new(p("so3_parseval"), 1e-10, so3_parseval),
            CheckDef::new(p("wigner_d_l1_closed_form"), 1e-14, wigner_l1),
            CheckDef::new(p("cg_racah_oracle"), 1e-12, cg_racah),
            CheckDef::new(p("cg_dual_pair_selection"), 1e-14, cg_dual_pairs),
            CheckDef::new(p("wigner_z_restriction_diagonal"), 1e-14, z_restriction),
        ],
        Suite::Sparsity => {
            let mut v: Vec<CheckDef> = cfg
                .orders()
                .into_iter()
                .map(|k| CheckDef::with(p(&format!("lift_off_column_k{k:+}")), 1e-10, move |rng, cfg| off_column(rng, cfg, k)))
                .collect();
            v.push(CheckDef::new(p("lift_project_round_trip"), 1e-12, lift_project));
            v
        }
        Suite::ConvEquivariance => {
            let mut v = Vec::new();
            for mi in cfg.orders() {
                for mo in cfg.orders() {
                    v.push(CheckDef::with(p(&format!("rotation_m{mi:+}_{mo:+}")), 1e-8, move |rng, cfg| {
                        conv_equivariance(rng, cfg, mi, mo)
                    }));
                }
            }
            v.push(CheckDef::new(p("dense_kernel_sufficiency"), 1e-12, dense_sufficiency));
            v
        }
        Suite::ConvOracle => {
            let b = cfg.bandwidth.min(4);
            [(0i64, 0i64), (1, -1), (-2, 1), (0, 2), (2, 2)]
                .into_iter()
                .filter(|(a, c)| a.unsigned_abs().max(c.unsigned_abs()) < b as u64)
                .map(|(mi, mo)| {
                    CheckDef::with(p(&format!("spatial_oracle_m{mi:+}_{mo:+}")), 1e-6, move |rng, cfg| {
                        conv_oracle(rng, cfg, mi, mo)
                    })
                })
                .collect()
        }
        Suite::Nonlin => vec![
            CheckDef::new(p("grid_aligned_equivariance"), 1e-12, grid_aligned),
            CheckDef::new(p("oversampling_sweep_ratio"), 1.0, oversampling_sweep),
            CheckDef::new(p("identity_path_equivariance"), 1e-10, identity_path),
            CheckDef::new(p("delta_kernel_projection"), 1e-10, delta_projection),
            CheckDef::new(p("prior_work_equivalence"), 1e-10, prior_work),
            CheckDef::new(p("point_sphere_equivariance"), 1e-8, point_equivariance),
        ],
        Suite::Se2 => vec![CheckDef::new(p("kernel_steerability"), 1e-12, se2_steer)],
        Suite::Se3 => vec![
            CheckDef::new(p("kernel_steerability"), 1e-10, se3_steer),
            CheckDef::new(p("kernel_t_orthogonality"), 1e-11, se3_orthogonality),
            CheckDef::new(p("tfn_equivariance"), 1e-9, tfn_equivariance),
            CheckDef::new(p("layer_equivariance"), 1e-8, |rng, cfg| layer_equivariance(rng, cfg, 1)),
            CheckDef::new(p("two_layer_equivariance"), 1e-7, |rng, cfg| layer_equivariance(rng, cfg, 2)),
        ],
        Suite::Gradients => vec![
            CheckDef::new(p("vjp_adjoint"), 1e-12, vjp_adjoint),
            CheckDef::new(p("vjp_finite_difference"), 1e-8, vjp_fd),
        ],
        Suite::All => Vec::new(),
    }
}

fn rel(a: &[Vec<C>], b: &[Vec<C>]) -> f64 {
    let (mut n, mut d) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        for (u, v) in x.iter().zip(y) {
            n += (u - v).norm_sqr();
            d += v.norm_sqr();
        }
    }
    if d == 0.0 {
        n.sqrt()
    } else {
        (n / d).sqrt()
    }
}

fn flat(c: &ColumnSpectrum) -> Vec<C> {
    c.coeffs.iter().flatten().flatten().copied().collect()
}

fn s2(b: usize) -> Result<QuadratureGrid> {
    QuadratureGrid::new(Space::S2, b)
}

fn field(rng: &mut ChaCha8Rng, b: usize, k: i64, ch: usize) -> Result<TensorField> {
    TensorField::from_spectrum(&random::column(rng, b, k, ch), &s2(b)?)
}

fn rotation(rng: &mut ChaCha8Rng) -> GroupElement {
    GroupElement::So3(random::rotation(rng))
}

// ---- transforms ----

fn sht_round_trip(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let b = cfg.bandwidth;
    let grid = s2(b)?;
    let a = random::sht_coeffs(rng, b, 3);
    let back = sht_analyze(&grid, &sht_synthesize(&a, &grid)?, b)?;
    Ok(rel(&back.coeffs.concat(), &a.coeffs.concat()))
}

fn sht_parseval(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let b = cfg.bandwidth;
    let grid = s2(b)?;
    let a = random::sht_coeffs(rng, b, 3);
    let f = sht_synthesize(&a, &grid)?;
    let spatial: f64 = f.iter().map(|ch| ch.iter().zip(grid.weights()).map(|(z, w)| w * z.norm_sqr()).sum::<f64>()).sum();
    let spectral: f64 = a.coeffs.iter().flatten().flatten().map(|z| z.norm_sqr()).sum();
    Ok((spatial - spectral).abs() / spectral)
}

fn so3_round_trip(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let grid = QuadratureGrid::new(Space::SO3, cfg.bandwidth)?;
    let s = random::blocks(rng, cfg.bandwidth, 3);
    let back = so3_ft_forward(&grid, &so3_synthesize(&s, &grid)?)?;
    let (mut n, mut d) = (0.0, 0.0);
    for (x, y) in back.blocks.iter().flatten().zip(s.blocks.iter().flatten()) {
        n += (x - y).norm_squared();
        d += y.norm_squared();
    }
    Ok((n / d).sqrt())
}

fn so3_parseval(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let grid = QuadratureGrid::new(Space::SO3, cfg.bandwidth)?;
    let s = random::blocks(rng, cfg.bandwidth, 3);
    let f = so3_synthesize(&s, &grid)?;
    let spatial: f64 = f.iter().map(|ch| ch.iter().zip(grid.weights()).map(|(z, w)| w * z.norm_sqr()).sum::<f64>()).sum();
    let spectral = s.weighted_energy();
    Ok((spatial - spectral).abs() / spectral)
}

fn wigner_l1(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.trials {
        let beta = rng.random_range(0.0..PI);
        let (s, c) = beta.sin_cos();
        // rows/cols m = -1, 0, 1
        let exact = [
            [(1.0 + c) / 2.0, s * FRAC_1_SQRT_2, (1.0 - c) / 2.0],
            [-s * FRAC_1_SQRT_2, c, s * FRAC_1_SQRT_2],
            [(1.0 - c) / 2.0, -s * FRAC_1_SQRT_2, (1.0 + c) / 2.0],
        ];
        let d = wigner_d(1, beta);
        for (i, row) in exact.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst = worst.max((d[(i, j)] - v).abs());
            }
        }
    }
    Ok(worst)
}

/// Plain floating-point Racah formula.
fn racah(l1: i64, m1: i64, l2: i64, m2: i64, l: i64, m: i64) -> f64 {
    if m1 + m2 != m || l < (l1 - l2).abs() || l > l1 + l2 || m1.abs() > l1 || m2.abs() > l2 || m.abs() > l {
        return 0.0;
    }
    let f = |n: i64| -> f64 { (1..=n).map(|k| k as f64).product() };
    let pre = ((2 * l + 1) as f64 * f(l + l1 - l2) * f(l - l1 + l2) * f(l1 + l2 - l) / f(l1 + l2 + l + 1)).sqrt()
        * (f(l + m) * f(l - m) * f(l1 - m1) * f(l1 + m1) * f(l2 - m2) * f(l2 + m2)).sqrt();
    let mut s = 0.0;
    for k in 0..=(l1 + l2 - l) {
        let den = [k, l1 + l2 - l - k, l1 - m1 - k, l2 + m2 - k, l - l2 + m1 + k, l - l1 - m2 + k];
        if den.iter().any(|&x| x < 0) {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign / den.iter().map(|&x| f(x)).product::<f64>();
    }
    pre * s
}

fn cg_racah(_: &mut ChaCha8Rng, _: &SuiteConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for l1 in 0..=4i64 {
        for l2 in 0..=4i64 {
            for l in (l1 - l2).abs()..=(l1 + l2).min(4) {
                for m1 in -l1..=l1 {
                    for m2 in -l2..=l2 {
                        let m = m1 + m2;
                        if m.abs() > l {
                            continue;
                        }
                        let v = clebsch_gordan(l1 as usize, m1, l2 as usize, m2, l as usize, m);
                        worst = worst.max((v - racah(l1, m1, l2, m2, l, m)).abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn cg_dual_pairs(_: &mut ChaCha8Rng, _: &SuiteConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for l1 in 0..6usize {
        for l2 in 0..6usize {
            for m1 in -(l1 as i64)..=l1 as i64 {
                for m2 in -(l2 as i64)..=l2 as i64 {
                    let v = clebsch_gordan(l1, m1, l2, m2, 0, 0);
                    let e = if l1 == l2 && m1 == -m2 {
                        let s = if (l1 as i64 - m1) % 2 == 0 { 1.0 } else { -1.0 };
                        s / ((2 * l1 + 1) as f64).sqrt()
                    } else {
                        0.0
                    };
                    worst = worst.max((v - e).abs());
                }
            }
        }
    }
    Ok(worst)
}

fn z_restriction(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.trials {
        let th = rng.random_range(0.0..TAU);
        let g = Rotation3::rz(th);
        for l in 0..cfg.bandwidth {
            let d = wigner_D(l, &g);
            let li = l as i64;
            for m in -li..=li {
                for n in -li..=li {
                    let e = if m == n { C::from_polar(1.0, -(m as f64) * th) } else { C::new(0.0, 0.0) };
                    worst = worst.max((d.get(m, n) - e).norm());
                }
            }
        }
    }
    Ok(worst)
}

// ---- sparsity ----

fn off_column(rng: &mut ChaCha8Rng, cfg: &SuiteConfig, k: i64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.trials.min(5) {
        let f = field(rng, cfg.bandwidth, k, 2)?;
        let s = lift(&f).spectrum()?;
        worst = worst.max(s.off_column_energy(k) / s.weighted_energy());
    }
    Ok(worst)
}

fn lift_project(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in cfg.orders() {
        let f = field(rng, cfg.bandwidth, k, 2)?;
        let back = crate::fields::project(&lift(&f), f.field_type)?;
        worst = worst.max(rel(&back.samples, &f.samples));
    }
    Ok(worst)
}

// ---- convolution ----

fn rand_kernel(rng: &mut ChaCha8Rng, mi: i64, mo: i64, b: usize, co: usize, ci: usize) -> Result<SparseKernelSpec> {
    SparseKernelSpec::from_fn(mi, mo, b, co, ci, |_, _, _| random::complex(rng))
}

fn conv_equivariance(rng: &mut ChaCha8Rng, cfg: &SuiteConfig, mi: i64, mo: i64) -> Result<f64> {
    let b = cfg.bandwidth;
    let f = field(rng, b, mi, 2)?;
    let k = rand_kernel(rng, mi, mo, b, 2, 2)?;
    let out = conv_field(&f, &k)?;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.trials {
        let g = rotation(rng);
        let a = conv_field(&induced_action(&g, &f)?, &k)?;
        let c = induced_action(&g, &out)?;
        worst = worst.max(rel(&a.samples, &c.samples));
    }
    Ok(worst)
}

fn dense_sufficiency(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let b = cfg.bandwidth;
    let mut worst: f64 = 0.0;
    for mi in cfg.orders() {
        for mo in cfg.orders() {
            let f = field(rng, b, mi, 2)?;
            let fhat = lift(&f).spectrum()?;
            let dense: DenseKernel = (0..2)
                .map(|_| {
                    (0..2)
                        .map(|_| (0..b).map(|l| DMatrix::from_fn(2 * l + 1, 2 * l + 1, |_, _| random::complex(rng))).collect())
                        .collect()
                })
                .collect();
            let k = SparseKernelSpec::from_fn(mi, mo, b, 2, 2, |o, i, l| {
                let li = l as i64;
                dense[o][i][l][((mi + li) as usize, (mo + li) as usize)]
            })?;
            let full = flat(&conv_dense(&fhat, &dense)?.column(mo)?);
            let sparse = flat(&conv_spectral(&fhat, &k)?.column(mo)?);
            let d = full.iter().zip(&sparse).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

fn conv_oracle(rng: &mut ChaCha8Rng, cfg: &SuiteConfig, mi: i64, mo: i64) -> Result<f64> {
    let b = cfg.bandwidth.min(4);
    let f = field(rng, b, mi, 2)?;
    let k = rand_kernel(rng, mi, mo, b, 2, 2)?;
    let spectral = conv_field(&f, &k)?;
    let oracle = conv_spatial_oracle(&f, &k)?;
    Ok(rel(&oracle.samples, &spectral.samples))
}

// ---- nonlinearity ----

fn fields_for(rng: &mut ChaCha8Rng, b: usize) -> Result<Vec<TensorField>> {
    (-1i64..=1).map(|k| field(rng, b, k, 1)).collect()
}

fn nonlin_orders(b: usize) -> Vec<i64> {
    (-1i64..=1).filter(|m| m.unsigned_abs() < b as u64).collect()
}

fn max_equivariance_error(
    fs: &[TensorField],
    gs: &[GroupElement],
    spec: &ActivationSpec,
    orders: &[i64],
    opts: NonlinOptions,
    relative: bool,
) -> Result<f64> {
    let base = nonlinearity(fs, spec, orders, opts)?;
    let mut worst: f64 = 0.0;
    for g in gs {
        let moved = fs.iter().map(|f| induced_action(g, f)).collect::<Result<Vec<_>>>()?;
        let out = nonlinearity(&moved, spec, orders, opts)?;
        for (x, y) in out.iter().zip(&base) {
            let y = induced_action(g, y)?;
            let e = if relative {
                rel(&x.samples, &y.samples)
            } else {
                x.samples.iter().flatten().zip(y.samples.iter().flatten()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
            };
            worst = worst.max(e);
        }
    }
    Ok(worst)
}

fn grid_aligned(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let b = cfg.bandwidth;
    let fs = fields_for(rng, b)?;
    let step = PI / b as f64;
    let gs: Vec<GroupElement> =
        (0..cfg.trials.min(2 * b)).map(|_| GroupElement::So3(Rotation3::rz(rng.random_range(1..2 * b) as f64 * step))).collect();
    let spec = ActivationSpec::new(ActivationKind::Relu);
    max_equivariance_error(&fs, &gs, &spec, &nonlin_orders(b), NonlinOptions { oversample: cfg.oversample }, false)
}

/// Largest ratio of successive errors across oversampling 1, 2, 4; below one
/// means strictly decreasing.
fn oversampling_sweep(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let b = cfg.bandwidth.min(4);
    let fs = fields_for(rng, b)?;
    let gs: Vec<GroupElement> = (0..cfg.trials.min(5)).map(|_| rotation(rng)).collect();
    let spec = ActivationSpec::new(ActivationKind::Relu);
    let errs = [1, 2, 4]
        .iter()
        .map(|&os| max_equivariance_error(&fs, &gs, &spec, &nonlin_orders(b), NonlinOptions { oversample: os }, true))
        .collect::<Result<Vec<_>>>()?;
    Ok((errs[1] / errs[0]).max(errs[2] / errs[1]))
}

fn identity_path(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let b = cfg.bandwidth;
    let fs = fields_for(rng, b)?;
    let gs: Vec<GroupElement> = (0..cfg.trials.min(5)).map(|_| rotation(rng)).collect();
    let spec = ActivationSpec::new(ActivationKind::Identity);
    max_equivariance_error(&fs, &gs, &spec, &nonlin_orders(b), NonlinOptions { oversample: cfg.oversample }, true)
}

fn delta_projection(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let b = cfg.bandwidth;
    let l = lift_sum(&fields_for(rng, b)?)?;
    let mut worst: f64 = 0.0;
    for m in nonlin_orders(b) {
        let k = delta_kernel(&l.grid, m)?;
        worst = worst.max(rel(&project_kernel(&l, &k, m)?.samples, &project_column(&l, m)?.samples));
    }
    Ok(worst)
}

fn random_features(rng: &mut ChaCha8Rng, lmax: usize, ch: usize, scale: f64) -> SphereFeatures {
    (0..=lmax).map(|l| (l, DMatrix::from_fn(2 * l + 1, ch, |_, _| scale * rng.random_range(-1.0..1.0)))).collect()
}

fn feat_diff(a: &SphereFeatures, b: &SphereFeatures) -> f64 {
    let n: f64 = a.iter().map(|(l, x)| (x - &b[l]).norm_squared()).sum();
    let d: f64 = b.values().map(|x| x.norm_squared()).sum();
    (n / d).sqrt()
}

fn prior_work(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let bs = cfg.bandwidth.min(4);
    let lmax = (bs - 1).min(2);
    let opts = PointNonlinOptions { sphere_bandwidth: bs, oversample: cfg.oversample };
    let orders: Vec<usize> = (0..bs).collect();
    let mut worst: f64 = 0.0;
    for kind in [ActivationKind::Relu, ActivationKind::Gelu] {
        let spec = ActivationSpec::new(kind);
        let f = random_features(rng, lmax, 2, 0.8);
        let a = point_sphere_nonlin(std::slice::from_ref(&f), &spec, &orders, opts)?;
        let b = point_nonlin_via_group(&f, &spec, &orders, opts)?;
        worst = worst.max(feat_diff(&a[0], &b));
    }
    Ok(worst)
}

fn rotate_features(f: &SphereFeatures, r: &Rotation3) -> SphereFeatures {
    f.iter().map(|(&l, b)| (l, real_wigner(&wigner_D(l, r)) * b)).collect()
}

fn point_equivariance(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let spec = ActivationSpec::new(ActivationKind::Gelu);
    let opts = PointNonlinOptions { sphere_bandwidth: 8, oversample: cfg.oversample };
    let orders = [0, 1, 2];
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.trials.min(10) {
        let f = random_features(rng, 2, 2, 0.5);
        let r = random::rotation(rng);
        let a = point_sphere_nonlin(&[rotate_features(&f, &r)], &spec, &orders, opts)?;
        let b = rotate_features(&point_sphere_nonlin(&[f], &spec, &orders, opts)?[0], &r);
        worst = worst.max(feat_diff(&a[0], &b));
    }
    Ok(worst)
}

// ---- rigid-motion kernels ----

fn bump() -> RadialProfile {
    RadialProfile::from_fn(33, 2.0, |r| (-(r - 0.8) * (r - 0.8)).exp() * (2.0 - r))
}

fn rand_vec(rng: &mut ChaCha8Rng, s: f64) -> Vector3<f64> {
    Vector3::new(rng.random_range(-s..s), rng.random_range(-s..s), rng.random_range(-s..s))
}

fn se2_steer(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for mi in -4i64..=4 {
        for mo in -4i64..=4 {
            let k = SE2KernelBasis::new(mi, mo, bump());
            for _ in 0..cfg.trials {
                let x = Vector2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let th = rng.random_range(0.0..TAU);
                let (s, c) = th.sin_cos();
                let rx = Vector2::new(c * x.x - s * x.y, s * x.x + c * x.y);
                let e = k.eval(&rx) - C::from_polar(1.0, (mo - mi) as f64 * th) * k.eval(&x);
                worst = worst.max(e.norm());
            }
        }
    }
    Ok(worst)
}

fn se3_steer(rng: &mut ChaCha8Rng, _: &SuiteConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for li in 0..=3 {
        for lo in 0..=3 {
            for k in SE3KernelBasis::all_for(li, lo, |_| bump())? {
                for _ in 0..50 {
                    let r = random::rotation(rng);
                    let x = rand_vec(rng, 1.0);
                    let a = k.eval(&r.apply(&x));
                    let b = real_wigner(&wigner_D(lo, &r)) * k.eval(&x) * real_wigner(&wigner_D(li, &r)).transpose();
                    worst = worst.max((a - b).abs().max());
                }
            }
        }
    }
    Ok(worst)
}

fn se3_orthogonality(_: &mut ChaCha8Rng, _: &SuiteConfig) -> Result<f64> {
    let grid = s2(8)?;
    let unit = RadialProfile::constant(1.0, 2.0);
    let mut worst: f64 = 0.0;
    for li in 0..=3 {
        for lo in 0..=3 {
            let ks = SE3KernelBasis::all_for(li, lo, |_| unit.clone())?;
            let samples: Vec<Vec<DMatrix<f64>>> = ks
                .iter()
                .map(|k| grid.nodes().iter().map(|n| k.eval(&SpherePoint::new(n.alpha, n.beta).to_vector())).collect())
                .collect();
            for a in 0..ks.len() {
                for b in a + 1..ks.len() {
                    let ip: f64 =
                        grid.weights().iter().enumerate().map(|(i, w)| w * samples[a][i].dot(&samples[b][i])).sum();
                    worst = worst.max(ip.abs());
                }
            }
        }
    }
    Ok(worst)
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, ch: usize, scale: f64) -> Result<PointCloud> {
    let positions = (0..n).map(|_| rand_vec(rng, 1.0)).collect();
    let features = (0..n).map(|_| random_features(rng, 2, ch, scale)).collect();
    PointCloud::new(positions, features)
}

fn random_conv(rng: &mut ChaCha8Rng, ch_in: usize, ch_out: usize, scale: f64) -> Result<TfnConv> {
    let mut terms = Vec::new();
    for li in 0..=2 {
        for lo in 0..=2 {
            for basis in SE3KernelBasis::all_for(li, lo, |_| bump())? {
                let weights = DMatrix::from_fn(ch_out, ch_in, |_, _| scale * rng.random_range(-1.0..1.0));
                terms.push(TfnTerm { basis, weights });
            }
        }
    }
    Ok(TfnConv { terms, radius: 1.2 })
}

fn cloud_rel(a: &PointCloud, b: &PointCloud) -> f64 {
    let (mut n, mut d) = (0.0, 0.0);
    for (fa, fb) in a.features.iter().zip(&b.features) {
        for (l, x) in fa {
            n += (x - &fb[l]).norm_squared();
            d += fb[l].norm_squared();
        }
    }
    (n / d).sqrt()
}

fn tfn_equivariance(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let cloud = random_cloud(rng, 64, 2, 1.0)?;
    let conv = random_conv(rng, 2, 3, 1.0)?;
    let out = tfn_point_conv(&cloud, &conv)?;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.trials.min(5) {
        let r = random::rotation(rng);
        let t = rand_vec(rng, 3.0);
        let a = tfn_point_conv(&cloud.rototranslate(&r, &t), &conv)?;
        worst = worst.max(cloud_rel(&a, &out.rototranslate(&r, &t)));
    }
    Ok(worst)
}

fn layer_equivariance(rng: &mut ChaCha8Rng, cfg: &SuiteConfig, depth: usize) -> Result<f64> {
    let cloud = random_cloud(rng, 64, 2, 0.5)?;
    let layers = (0..depth)
        .map(|_| {
            let si = SelfInteraction {
                weights: (0..=2).map(|l| (l, DMatrix::from_fn(2, 2, |_, _| 0.04 * rng.random_range(-1.0..1.0)))).collect(),
            };
            Ok(Se3LayerSpec {
                conv: random_conv(rng, 2, 2, 0.04)?,
                self_interaction: Some(si),
                activation: ActivationSpec::new(ActivationKind::Gelu),
                out_orders: vec![0, 1, 2],
                nonlin: PointNonlinOptions { sphere_bandwidth: 8, oversample: cfg.oversample },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let run = |c: &PointCloud| layers.iter().try_fold(c.clone(), |acc, l| se3_layer(&acc, l));
    let out = run(&cloud)?;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.trials.min(3) {
        let r = random::rotation(rng);
        let t = rand_vec(rng, 3.0);
        let a = run(&cloud.rototranslate(&r, &t))?;
        worst = worst.max(cloud_rel(&a, &out.rototranslate(&r, &t)));
    }
    Ok(worst)
}

// ---- gradients ----

fn ip(x: &[C], y: &[C]) -> f64 {
    x.iter().zip(y).map(|(p, q)| (p.conj() * q).re).sum()
}

fn kflat(k: &SparseKernelSpec) -> Vec<C> {
    k.coeffs.iter().flatten().flatten().copied().collect()
}

fn vjp_adjoint(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let b = cfg.bandwidth;
    let mut worst: f64 = 0.0;
    for (mi, mo) in [(0i64, 0i64), (1, -1), (-1, 1)] {
        if mi.unsigned_abs().max(mo.unsigned_abs()) >= b as u64 {
            continue;
        }
        let a = random::column(rng, b, mi, 2);
        let k = rand_kernel(rng, mi, mo, b, 3, 2)?;
        let u = random::column(rng, b, mo, 3);
        let y = conv_column(&a, &k)?;
        let (ga, gk) = conv_vjp(&a, &k, &u)?;
        let lhs = ip(&flat(&u), &flat(&y));
        let scale = lhs.abs().max(1.0);
        worst = worst.max((lhs - ip(&flat(&ga), &flat(&a))).abs() / scale);
        worst = worst.max((lhs - ip(&kflat(&gk), &kflat(&k))).abs() / scale);
    }
    Ok(worst)
}

fn vjp_fd(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<f64> {
    let b = cfg.bandwidth;
    let (mi, mo) = (1i64.min(b as i64 - 1), -1i64.max(1 - b as i64));
    let a = random::column(rng, b, mi, 2);
    let k = rand_kernel(rng, mi, mo, b, 3, 2)?;
    let y = conv_column(&a, &k)?;
    let (ga, gk) = conv_vjp(&a, &k, &y)?;
    let da = random::column(rng, b, mi, 2);
    let dk = rand_kernel(rng, mi, mo, b, 3, 2)?;
    let loss = |s: f64| -> Result<f64> {
        let mut a2 = a.clone();
        for (x, d) in a2.coeffs.iter_mut().flatten().flatten().zip(da.coeffs.iter().flatten().flatten()) {
            *x += d * s;
        }
        let mut k2 = k.clone();
        for (x, d) in k2.coeffs.iter_mut().flatten().flatten().zip(dk.coeffs.iter().flatten().flatten()) {
            *x += d * s;
        }
        Ok(0.5 * flat(&conv_column(&a2, &k2)?).iter().map(|z| z.norm_sqr()).sum::<f64>())
    };
    let h = 1e-5;
    let fd = (loss(h)? - loss(-h)?) / (2.0 * h);
    let an = ip(&flat(&ga), &flat(&da)) + ip(&kflat(&gk), &kflat(&dk));
    Ok((fd - an).abs() / an.abs())
}

