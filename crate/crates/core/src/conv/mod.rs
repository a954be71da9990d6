//! Equivariant convolution on S² in the Fourier domain.
//!
//! An input of order `m_in` has spectrum supported on column `m_in`; an
//! equivariant kernel to order `m_out` only needs the entries
//! `κ̂^l_{m_in, m_out} = c^l`, `l ≥ max(|m_in|, |m_out|)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{GroupFunction, TensorField};
use crate::groups::{sphere_projection, sphere_section, sphere_twist, QuadratureGrid, Space, SpherePoint};
use crate::harmonics::wigner_d_all;
use crate::transforms::{check_order, ColumnSpectrum, SpectralBlocks};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);

/// Kernel coefficients `c^l` for one `(m_in, m_out)` pair and every channel pair.
///
/// `coeffs[out][in][l - lmin]` for `lmin = max(|m_in|, |m_out|) ≤ l < B`;
/// lower degrees are structurally absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseKernelSpec {
    pub m_in: i64,
    pub m_out: i64,
    #[serde(rename = "B")]
    pub bandwidth: usize,
    pub coeffs: Vec<Vec<Vec<C>>>,
}

impl SparseKernelSpec {
    pub fn zeros(m_in: i64, m_out: i64, bandwidth: usize, out_channels: usize, in_channels: usize) -> Result<Self> {
        check_order(m_in, bandwidth)?;
        check_order(m_out, bandwidth)?;
        let n = bandwidth - lmin(m_in, m_out);
        Ok(Self {
            m_in,
            m_out,
            bandwidth,
            coeffs: vec![vec![vec![ZERO; n]; in_channels]; out_channels],
        })
    }

    pub fn from_fn<F: FnMut(usize, usize, usize) -> C>(
        m_in: i64,
        m_out: i64,
        bandwidth: usize,
        out_channels: usize,
        in_channels: usize,
        mut f: F,
    ) -> Result<Self> {
        let mut k = Self::zeros(m_in, m_out, bandwidth, out_channels, in_channels)?;
        let lo = k.min_degree();
        for (o, row) in k.coeffs.iter_mut().enumerate() {
            for (i, cs) in row.iter_mut().enumerate() {
                for (t, c) in cs.iter_mut().enumerate() {
                    *c = f(o, i, t + lo);
                }
            }
        }
        Ok(k)
    }

    pub fn min_degree(&self) -> usize {
        lmin(self.m_in, self.m_out)
    }

    /// Number of free coefficients per channel pair.
    pub fn dimension(&self) -> usize {
        self.bandwidth - self.min_degree()
    }

    pub fn out_channels(&self) -> usize {
        self.coeffs.len()
    }

    pub fn in_channels(&self) -> usize {
        self.coeffs.first().map_or(0, |r| r.len())
    }

    /// `c^l` for channel pair `(o, i)`, zero below the minimum degree.
    pub fn coeff(&self, o: usize, i: usize, l: usize) -> C {
        if l < self.min_degree() {
            ZERO
        } else {
            self.coeffs[o][i][l - self.min_degree()]
        }
    }

    /// The kernel acting on complex conjugates: orders `(-m_in, -m_out)` and
    /// coefficients `(-1)^{m_out - m_in} conj(c^l)`, so that
    /// `conv(conj f) = conj(conv f)`. Pairing both gives real outputs on real pairs.
    pub fn conjugate_partner(&self) -> Self {
        let s = if (self.m_out - self.m_in).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Self {
            m_in: -self.m_in,
            m_out: -self.m_out,
            bandwidth: self.bandwidth,
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(|cs| cs.iter().map(|c| c.conj() * s).collect()).collect())
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_order(self.m_in, self.bandwidth)?;
        check_order(self.m_out, self.bandwidth)?;
        let n = self.dimension();
        let ci = self.in_channels();
        for row in &self.coeffs {
            if row.len() != ci || row.iter().any(|cs| cs.len() != n) {
                return Err(Error::Shape(format!("each channel pair needs {n} coefficients")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let k: Self = serde_json::from_str(s)?;
        k.validate()?;
        Ok(k)
    }
}

fn lmin(a: i64, b: i64) -> usize {
    a.unsigned_abs().max(b.unsigned_abs()) as usize
}

/// Spectral convolution of a column spectrum of order `m_in`.
pub fn conv_column(f_hat: &ColumnSpectrum, k: &SparseKernelSpec) -> Result<ColumnSpectrum> {
    if f_hat.order != k.m_in {
        return Err(Error::SparsityMismatch {
            expected: k.m_in as i32,
            found: f_hat.order as i32,
        });
    }
    if f_hat.bandwidth != k.bandwidth {
        return Err(Error::Shape(format!(
            "input bandwidth {} differs from kernel bandwidth {}",
            f_hat.bandwidth, k.bandwidth
        )));
    }
    if f_hat.channels() != k.in_channels() {
        return Err(Error::Shape(format!(
            "input has {} channels, kernel expects {}",
            f_hat.channels(),
            k.in_channels()
        )));
    }
    let mut out = ColumnSpectrum::zeros(k.bandwidth, k.m_out, k.out_channels());
    out.coeffs.par_iter_mut().enumerate().for_each(|(o, ch)| {
        for (l, row) in ch.iter_mut().enumerate().skip(k.min_degree()) {
            for i in 0..k.in_channels() {
                let c = k.coeff(o, i, l);
                for (slot, a) in row.iter_mut().zip(&f_hat.coeffs[i][l]) {
                    *slot += c * a;
                }
            }
        }
    });
    Ok(out)
}

/// Column carrying most of the energy of a block spectrum.
fn dominant_column(f: &SpectralBlocks) -> i64 {
    let b = f.bandwidth as i64;
    (-(b - 1)..b)
        .map(|n| (n, f.weighted_energy() - f.off_column_energy(n)))
        .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc })
        .0
}

/// Block form of [`conv_column`]: the input must be column-sparse at `k.m_in`.
pub fn conv_spectral(f_hat: &SpectralBlocks, k: &SparseKernelSpec) -> Result<SpectralBlocks> {
    let total = f_hat.weighted_energy();
    if f_hat.off_column_energy(k.m_in) > 1e-10 * total {
        return Err(Error::SparsityMismatch {
            expected: k.m_in as i32,
            found: dominant_column(f_hat) as i32,
        });
    }
    Ok(conv_column(&f_hat.column(k.m_in)?, k)?.to_blocks())
}

/// Dense kernel blocks `κ̂^l` per channel pair, `[out][in][l]`.
pub type DenseKernel = Vec<Vec<Vec<DMatrix<C>>>>;

/// Unrestricted spectral convolution `out^l = Σ_i f̂_i^l κ̂_{o,i}^l`.
pub fn conv_dense(f_hat: &SpectralBlocks, kernel: &DenseKernel) -> Result<SpectralBlocks> {
    let b = f_hat.bandwidth;
    let mut out = SpectralBlocks::zeros(b, kernel.len());
    for (o, row) in kernel.iter().enumerate() {
        if row.len() != f_hat.channels() {
            return Err(Error::Shape("dense kernel channel count mismatch".into()));
        }
        for (i, ks) in row.iter().enumerate() {
            if ks.len() != b {
                return Err(Error::Shape("dense kernel bandwidth mismatch".into()));
            }
            for l in 0..b {
                out.blocks[o][l] += &f_hat.blocks[i][l] * &ks[l];
            }
        }
    }
    Ok(out)
}

/// Convolution of a sampled field; the output lives on the same grid.
pub fn conv_field(f: &TensorField, k: &SparseKernelSpec) -> Result<TensorField> {
    let spec = f.spectrum_to(k.bandwidth)?;
    TensorField::from_spectrum(&conv_column(&spec, k)?, &f.grid)
}

/// `κ(R) = Σ_l c^l D^l_{m_in m_out}(R)` on the SO(3) grid of the kernel bandwidth.
/// Channel pairs are flattened as `out * in_channels + in`.
pub fn kernel_to_spatial(k: &SparseKernelSpec) -> Result<GroupFunction> {
    k.validate()?;
    let grid = QuadratureGrid::new(Space::SO3, k.bandwidth)?;
    let na = grid.axis_len();
    let (m1, m2) = (k.m_in, k.m_out);
    let rows: Vec<Vec<f64>> = grid
        .betas()
        .iter()
        .map(|&b| {
            let ds = wigner_d_all(k.bandwidth - 1, b);
            (0..k.bandwidth)
                .map(|l| {
                    if l < k.min_degree() {
                        0.0
                    } else {
                        let li = l as i64;
                        ds[l][((m1 + li) as usize, (m2 + li) as usize)]
                    }
                })
                .collect()
        })
        .collect();
    let mut samples = Vec::new();
    for o in 0..k.out_channels() {
        for i in 0..k.in_channels() {
            let mut ch = vec![ZERO; grid.len()];
            for (idx, n) in grid.nodes().iter().enumerate() {
                let j = idx / (na * na);
                let radial: C = (k.min_degree()..k.bandwidth).map(|l| k.coeff(o, i, l) * rows[j][l]).sum();
                ch[idx] = radial * C::from_polar(1.0, -(m1 as f64) * n.alpha - (m2 as f64) * n.gamma);
            }
            samples.push(ch);
        }
    }
    GroupFunction::new(grid, samples)
}

/// Direct quadrature of `f_out(x) = ∫_{S²} κ(s(y)⁻¹ s(x)) f(y) dy` with
/// `κ = Σ_l (2l+1) c^l D^l_{m_in m_out}`. The Euler angles of `s(y)⁻¹s(x)` are
/// split into a section part and the twist `e^{-i m_out h(s(y)⁻¹, x)}`.
/// Cost is quadratic in the number of grid nodes.
pub fn conv_spatial_oracle(f_in: &TensorField, k: &SparseKernelSpec) -> Result<TensorField> {
    k.validate()?;
    if f_in.order() != k.m_in {
        return Err(Error::SparsityMismatch {
            expected: k.m_in as i32,
            found: f_in.order() as i32,
        });
    }
    let grid = &f_in.grid;
    let pts: Vec<SpherePoint> = grid.nodes().iter().map(|n| SpherePoint::new(n.alpha, n.beta)).collect();
    let sections: Vec<_> = pts.iter().map(|&p| sphere_section(p).inverse()).collect();
    let (m1, m2) = (k.m_in, k.m_out);
    let lmax = k.bandwidth - 1;
    let out: Vec<Vec<C>> = pts
        .par_iter()
        .map(|&x| {
            let mut acc = vec![ZERO; k.out_channels()];
            for (y, sy_inv) in sections.iter().enumerate() {
                let r = sy_inv.compose(&sphere_section(x));
                let s = sphere_section(sphere_projection(&r));
                let theta = sphere_twist(sy_inv, x);
                let ds = wigner_d_all(lmax, s.beta);
                let phase = C::from_polar(1.0, -(m1 as f64) * s.alpha - (m2 as f64) * theta);
                let w = grid.weights()[y];
                for (o, slot) in acc.iter_mut().enumerate() {
                    for i in 0..k.in_channels() {
                        let mut kv = ZERO;
                        for l in k.min_degree()..=lmax {
                            let li = l as i64;
                            let d = ds[l][((m1 + li) as usize, (m2 + li) as usize)];
                            kv += k.coeff(o, i, l) * ((2 * l + 1) as f64 * d);
                        }
                        *slot += kv * phase * f_in.samples[i][y] * w;
                    }
                }
            }
            acc
        })
        .collect();
    let samples = (0..k.out_channels())
        .map(|o| out.iter().map(|v| v[o]).collect())
        .collect();
    TensorField::new(grid.clone(), crate::fields::FieldType::so2(m2), samples)
}

/// Cotangents of `conv_column` under `⟨x, y⟩ = Re Σ conj(x) y`.
pub fn conv_vjp(
    f_hat: &ColumnSpectrum,
    k: &SparseKernelSpec,
    upstream: &ColumnSpectrum,
) -> Result<(ColumnSpectrum, SparseKernelSpec)> {
    if upstream.order != k.m_out || upstream.channels() != k.out_channels() || upstream.bandwidth != k.bandwidth {
        return Err(Error::Shape("cotangent does not match the kernel output".into()));
    }
    if f_hat.order != k.m_in || f_hat.channels() != k.in_channels() || f_hat.bandwidth != k.bandwidth {
        return Err(Error::Shape("input does not match the kernel".into()));
    }
    let mut gf = ColumnSpectrum::zeros(k.bandwidth, k.m_in, k.in_channels());
    let mut gk = SparseKernelSpec::zeros(k.m_in, k.m_out, k.bandwidth, k.out_channels(), k.in_channels())?;
    let lo = k.min_degree();
    for l in lo..k.bandwidth {
        for o in 0..k.out_channels() {
            let u = &upstream.coeffs[o][l];
            for i in 0..k.in_channels() {
                let c = k.coeff(o, i, l).conj();
                for (g, uv) in gf.coeffs[i][l].iter_mut().zip(u) {
                    *g += c * uv;
                }
                gk.coeffs[o][i][l - lo] = u.iter().zip(&f_hat.coeffs[i][l]).map(|(uv, a)| uv * a.conj()).sum();
            }
        }
    }
    Ok((gf, gk))
}

#[cfg(test)]
mod tests;
