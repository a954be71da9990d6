//! Equivariant nonlinearities: lift the fields to SO(3), apply `ξ` pointwise,
//! project back to each output order.

mod activation;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

pub use activation::{ActivationKind, ActivationSpec, DenseLayer, Mlp};

use crate::error::{Error, Result};
use crate::fields::{is_mackey, lift, FieldType, GroupFunction, TensorField};
use crate::groups::{QuadratureGrid, Space};
use crate::harmonics::{real_basis_change, wigner_d_all};
use crate::transforms::{
    check_order, fiber_dft, sht_analyze, sht_synthesize, so3_ft_forward, spin_analysis, spin_synthesis, ColumnSpectrum,
    ShtCoeffs,
};

type C = Complex64;

/// Default oversampling factor of the activation grid.
pub const DEFAULT_OVERSAMPLE: usize = 2;

/// Tolerance on the Mackey residual of a projection kernel.
pub const KERNEL_MACKEY_TOL: f64 = 1e-8;

/// `l(g) = Σ_i f_i↑(g)` for fields sharing one grid and channel count.
pub fn lift_sum(fields: &[TensorField]) -> Result<GroupFunction> {
    let first = fields.first().ok_or_else(|| Error::Shape("lift_sum needs at least one field".into()))?;
    let mut acc = lift(first);
    for f in &fields[1..] {
        if f.grid != first.grid {
            return Err(Error::GridMismatch {
                expected: format!("{:?}", first.grid.descriptor()),
                found: format!("{:?}", f.grid.descriptor()),
            });
        }
        acc = acc.add(&lift(f))?;
    }
    Ok(acc)
}

/// `ξ` at every grid node; MLPs act across channels.
pub fn activate(l: &GroupFunction, spec: &ActivationSpec) -> Result<GroupFunction> {
    let out_ch = spec.out_channels(l.channels())?;
    let n = l.grid.len();
    let per_node: Vec<Vec<C>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let v: Vec<C> = l.samples.iter().map(|ch| ch[i]).collect();
            spec.apply_complex(&v)
        })
        .collect();
    let samples = (0..out_ch).map(|c| per_node.iter().map(|v| v[c]).collect()).collect();
    GroupFunction::new(l.grid.clone(), samples)
}

/// Column extraction: `f(x) = ∫_{SO(2)} e^{imγ} l(s(x)Rz(γ)) dγ` as an order-`m` field.
pub fn project_column(l: &GroupFunction, m: i64) -> Result<TensorField> {
    let grid = QuadratureGrid::new(Space::S2, l.bandwidth())?;
    TensorField::new(grid, FieldType::so2(m), fiber_dft(&l.grid, &l.samples, m)?)
}

/// `Σ_{l<B} (2l+1) D^l_{mm}`: the bandlimited kernel for which the kernel
/// projection reduces to column extraction.
pub fn delta_kernel(grid: &QuadratureGrid, m: i64) -> Result<GroupFunction> {
    grid.expect(Space::SO3, None)?;
    check_order(m, grid.bandwidth())?;
    let b = grid.bandwidth();
    let na = grid.axis_len();
    let radial: Vec<f64> = grid
        .betas()
        .iter()
        .map(|&beta| {
            wigner_d_all(b - 1, beta)
                .iter()
                .enumerate()
                .skip(m.unsigned_abs() as usize)
                .map(|(l, d)| (2 * l + 1) as f64 * d[((m + l as i64) as usize, (m + l as i64) as usize)])
                .sum()
        })
        .collect();
    let samples = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| radial[i / (na * na)] * C::from_polar(1.0, -(m as f64) * (n.alpha + n.gamma)))
        .collect();
    GroupFunction::new(grid.clone(), vec![samples])
}

/// `f(x) = ∫ κ(g⁻¹s(x)) l(g) dg`, evaluated spectrally. The kernel must be a
/// Mackey function of order `m` and have one channel or one per input channel.
pub fn project_kernel(l: &GroupFunction, kernel: &GroupFunction, m: i64) -> Result<TensorField> {
    if kernel.grid != l.grid {
        return Err(Error::GridMismatch {
            expected: format!("{:?}", l.grid.descriptor()),
            found: format!("{:?}", kernel.grid.descriptor()),
        });
    }
    if kernel.channels() != 1 && kernel.channels() != l.channels() {
        return Err(Error::Shape("kernel needs one channel or one per input channel".into()));
    }
    check_order(m, l.bandwidth())?;
    let (ok, residual) = is_mackey(kernel, FieldType::so2(m), KERNEL_MACKEY_TOL);
    if !ok {
        return Err(Error::NotMackey {
            residual,
            tolerance: KERNEL_MACKEY_TOL,
        });
    }
    let lh = so3_ft_forward(&l.grid, &l.samples)?;
    let kh = so3_ft_forward(&kernel.grid, &kernel.samples)?;
    let b = l.bandwidth();
    let mut out = ColumnSpectrum::zeros(b, m, l.channels());
    for (c, ch) in out.coeffs.iter_mut().enumerate() {
        let kc = if kernel.channels() == 1 { 0 } else { c };
        for (deg, row) in ch.iter_mut().enumerate().skip(m.unsigned_abs() as usize) {
            let col = (m + deg as i64) as usize;
            let prod = &lh.blocks[c][deg] * kh.blocks[kc][deg].column(col);
            row.copy_from_slice(prod.as_slice());
        }
    }
    TensorField::from_spectrum(&out, &QuadratureGrid::new(Space::S2, b)?)
}

/// Options for [`nonlinearity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonlinOptions {
    /// Activation grid bandwidth is `oversample × B`.
    pub oversample: usize,
}

impl Default for NonlinOptions {
    fn default() -> Self {
        Self {
            oversample: DEFAULT_OVERSAMPLE,
        }
    }
}

/// Lift-sum, `ξ`, column projection; inputs are resampled to the activation grid
/// and outputs are bandlimited back to the input bandwidth.
pub fn nonlinearity(
    fields: &[TensorField],
    spec: &ActivationSpec,
    out_orders: &[i64],
    opts: NonlinOptions,
) -> Result<Vec<TensorField>> {
    let first = fields.first().ok_or_else(|| Error::Shape("no input fields".into()))?;
    if opts.oversample == 0 {
        return Err(Error::Shape("oversample must be at least 1".into()));
    }
    let bs = first.bandwidth();
    for &m in out_orders {
        check_order(m, bs)?;
    }
    let fine = QuadratureGrid::new(Space::S2, bs * opts.oversample)?;
    let up = fields
        .iter()
        .map(|f| {
            if f.grid != first.grid {
                return Err(Error::GridMismatch {
                    expected: format!("{:?}", first.grid.descriptor()),
                    found: format!("{:?}", f.grid.descriptor()),
                });
            }
            TensorField::from_spectrum(&f.spectrum()?, &fine)
        })
        .collect::<Result<Vec<_>>>()?;
    let act = activate(&lift_sum(&up)?, spec)?;
    out_orders
        .iter()
        .map(|&m| {
            let col = project_column(&act, m)?;
            let spec = spin_analysis(&fine, &col.samples, m, bs)?;
            Ok(TensorField {
                grid: first.grid.clone(),
                field_type: FieldType::so2(m),
                samples: spin_synthesis(&spec, &first.grid)?,
            })
        })
        .collect()
}

/// Real features at one point: degree `l` ↦ `(2l+1) × channels` block in the real basis.
pub type SphereFeatures = BTreeMap<usize, DMatrix<f64>>;

fn feature_channels(f: &SphereFeatures) -> Result<usize> {
    let mut ch = None;
    for (l, b) in f {
        if b.nrows() != 2 * l + 1 {
            return Err(Error::Shape(format!("degree {l} block must have {} rows", 2 * l + 1)));
        }
        match ch {
            None => ch = Some(b.ncols()),
            Some(c) if c != b.ncols() => return Err(Error::Shape("all degrees need the same channel count".into())),
            _ => {}
        }
    }
    ch.ok_or_else(|| Error::Shape("no feature degrees".into()))
}

/// Complex coefficients `a = Q^† b` per channel, as an SHT container.
fn to_sht(f: &SphereFeatures, bandwidth: usize, channels: usize) -> ShtCoeffs {
    let mut c = ShtCoeffs::zeros(bandwidth, channels);
    for (&l, b) in f {
        let qh = real_basis_change(l).adjoint();
        for ch in 0..channels {
            let a = &qh * b.column(ch).map(|x| C::new(x, 0.0));
            for (k, v) in a.iter().enumerate() {
                c.coeffs[ch][l][k] = *v;
            }
        }
    }
    c
}

fn from_sht(c: &ShtCoeffs, out_orders: &[usize]) -> SphereFeatures {
    out_orders
        .iter()
        .map(|&l| {
            let q = real_basis_change(l);
            let cols: Vec<DVector<f64>> = c
                .coeffs
                .iter()
                .map(|ch| (&q * DVector::from_column_slice(&ch[l])).map(|z| z.re))
                .collect();
            (l, DMatrix::from_columns(&cols))
        })
        .collect()
}

/// Options for [`point_sphere_nonlin`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointNonlinOptions {
    /// Signal bandwidth on the sphere; feature degrees must be below it.
    pub sphere_bandwidth: usize,
    /// Activation grid bandwidth is `oversample × sphere_bandwidth`.
    pub oversample: usize,
}

impl Default for PointNonlinOptions {
    fn default() -> Self {
        Self {
            sphere_bandwidth: 8,
            oversample: DEFAULT_OVERSAMPLE,
        }
    }
}

/// Per point: synthesize `s(r) = Σ b^l_m Y^l_m(r)` in the real basis, apply `ξ`
/// (or an MLP across channels) on the sphere grid, and read back the requested degrees.
pub fn point_sphere_nonlin(
    features: &[SphereFeatures],
    spec: &ActivationSpec,
    out_orders: &[usize],
    opts: PointNonlinOptions,
) -> Result<Vec<SphereFeatures>> {
    let bs = opts.sphere_bandwidth;
    if bs == 0 || opts.oversample == 0 {
        return Err(Error::ZeroBandwidth);
    }
    if let Some(&l) = out_orders.iter().find(|&&l| l >= bs) {
        return Err(Error::OrderOutOfBand { order: l as i64, bandwidth: bs });
    }
    let grid = QuadratureGrid::new(Space::S2, bs * opts.oversample)?;
    features
        .par_iter()
        .map(|f| {
            let ch = feature_channels(f)?;
            if let Some(&l) = f.keys().find(|&&l| l >= bs) {
                return Err(Error::OrderOutOfBand { order: l as i64, bandwidth: bs });
            }
            let out_ch = spec.out_channels(ch)?;
            let s = sht_synthesize(&to_sht(f, bs, ch), &grid)?;
            let mut act = vec![vec![C::new(0.0, 0.0); grid.len()]; out_ch];
            for node in 0..grid.len() {
                let v: Vec<f64> = s.iter().map(|c| c[node].re).collect();
                for (c, x) in spec.apply_real(&v).into_iter().enumerate() {
                    act[c][node] = C::new(x, 0.0);
                }
            }
            Ok(from_sht(&sht_analyze(&grid, &act, bs)?, out_orders))
        })
        .collect()
}

/// The same computation routed through SO(3): lift
/// `l_0(R) = Σ_l sqrt(2l+1) Σ_m D^l_{0m}(R⁻¹) a^l_m`, apply `ξ`, and project with
/// `sqrt(2l+1) ∫ D^l_{m0}(R) ξ(l_0(R)) dR`.
pub fn point_nonlin_via_group(
    features: &SphereFeatures,
    spec: &ActivationSpec,
    out_orders: &[usize],
    opts: PointNonlinOptions,
) -> Result<SphereFeatures> {
    let bs = opts.sphere_bandwidth;
    let ch = feature_channels(features)?;
    let grid = QuadratureGrid::new(Space::SO3, bs * opts.oversample)?;
    let a = to_sht(features, bs, ch);
    let na = grid.axis_len();
    let lmax = bs - 1;
    let dtab: Vec<Vec<DMatrix<f64>>> = grid.betas().iter().map(|&b| wigner_d_all(lmax, b)).collect();
    // D^l_{0m}(R⁻¹) = conj(D^l_{m0}(R)) = e^{imα} d^l_{m0}(β)
    let lifted: Vec<Vec<C>> = (0..ch)
        .map(|c| {
            grid.nodes()
                .iter()
                .enumerate()
                .map(|(i, n)| {
                    let d = &dtab[i / (na * na)];
                    let mut s = C::new(0.0, 0.0);
                    for l in 0..bs {
                        let li = l as i64;
                        let w = ((2 * l + 1) as f64).sqrt();
                        for m in -li..=li {
                            let dv = d[l][((m + li) as usize, li as usize)];
                            s += a.coeffs[c][l][(m + li) as usize] * C::from_polar(w * dv, m as f64 * n.alpha);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    let lf = GroupFunction::new(grid.clone(), lifted)?;
    let real = GroupFunction::new(
        grid.clone(),
        lf.samples.iter().map(|c| c.iter().map(|z| C::new(z.re, 0.0)).collect()).collect(),
    )?;
    let act = activate(&real, spec)?;
    let blocks = so3_ft_forward(&grid, &act.samples)?;
    // f'^l_m = sqrt(2l+1) ∫ D_{m0} ξ = sqrt(2l+1) conj(∫ conj(D_{m0}) ξ) for real ξ.
    let mut out = ShtCoeffs::zeros(bs, act.channels());
    for (c, chb) in blocks.blocks.iter().enumerate() {
        for l in 0..bs {
            let li = l as i64;
            let w = ((2 * l + 1) as f64).sqrt();
            for m in -li..=li {
                out.coeffs[c][l][(m + li) as usize] = chb[l][((m + li) as usize, li as usize)].conj() * w;
            }
        }
    }
    Ok(from_sht(&out, out_orders))
}

#[cfg(test)]
mod tests;
