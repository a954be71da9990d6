//! Forward and inverse transforms on the equiangular grids.
//!
//! Sample arrays are channel-major: `data[channel][node]` with the node order
//! of [`QuadratureGrid`].

use num_complex::Complex64;
use rayon::prelude::*;

use super::spectra::{check_order, zero_triangle, ColumnSpectrum, ShtCoeffs, SpectralBlocks};
use super::tables::{tables, Tables};
use crate::error::{Error, Result};
use crate::groups::{QuadratureGrid, Space, SpherePoint};
use crate::harmonics::{legendre_table, wigner_d_all};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);

fn check_samples(grid: &QuadratureGrid, data: &[Vec<C>]) -> Result<()> {
    for (c, ch) in data.iter().enumerate() {
        if ch.len() != grid.len() {
            return Err(Error::Shape(format!(
                "channel {c} has {} samples, grid has {} nodes",
                ch.len(),
                grid.len()
            )));
        }
    }
    Ok(())
}

fn check_fits(grid: &QuadratureGrid, space: Space, bandwidth: usize) -> Result<()> {
    grid.expect(space, None)?;
    if bandwidth == 0 {
        return Err(Error::ZeroBandwidth);
    }
    if bandwidth > grid.bandwidth() {
        return Err(Error::GridMismatch {
            expected: format!("{space} grid with bandwidth ≥ {bandwidth}"),
            found: format!("bandwidth {}", grid.bandwidth()),
        });
    }
    Ok(())
}

/// `Y^l_m = s_m P̃^{|m|}_l e^{imα}`; returns `s_m`.
fn cs_sign(m: i64) -> f64 {
    if m >= 0 || m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(1/n) Σ_i row[i] e^{i·sign·m α_i}` for each `|m| < mlim`, indexed `m + mlim - 1`.
fn alpha_dft(t: &Tables, row: &[C], mlim: usize, sign: i64) -> Vec<C> {
    let n = row.len();
    let ml = mlim as i64;
    (-(ml - 1)..ml)
        .map(|m| {
            let s: C = row.iter().enumerate().map(|(i, &v)| v * t.twiddle(sign * m, i)).sum();
            s / n as f64
        })
        .collect()
}

/// Spherical-harmonic analysis truncated to degrees `l < bandwidth`.
pub fn sht_analyze(grid: &QuadratureGrid, data: &[Vec<C>], bandwidth: usize) -> Result<ShtCoeffs> {
    check_fits(grid, Space::S2, bandwidth)?;
    check_samples(grid, data)?;
    let t = tables(grid.bandwidth());
    let na = grid.axis_len();
    let coeffs = data
        .par_iter()
        .map(|ch| {
            let mut out = zero_triangle(bandwidth);
            for j in 0..na {
                let f = alpha_dft(&t, &ch[j * na..(j + 1) * na], bandwidth, -1);
                let w = t.beta_weights[j];
                for (l, row) in out.iter_mut().enumerate() {
                    let li = l as i64;
                    for m in -li..=li {
                        let p = t.p[j][l][m.unsigned_abs() as usize];
                        row[(m + li) as usize] += f[(m + bandwidth as i64 - 1) as usize] * (w * p * cs_sign(m));
                    }
                }
            }
            out
        })
        .collect();
    Ok(ShtCoeffs { bandwidth, coeffs })
}

/// `f^l_m = ⟨Y^l_m, f⟩` on a grid of bandwidth `B`.
pub fn sht_forward(grid: &QuadratureGrid, data: &[Vec<C>], bandwidth: usize) -> Result<ShtCoeffs> {
    grid.expect(Space::S2, Some(bandwidth))?;
    sht_analyze(grid, data, bandwidth)
}

/// Synthesis `Σ f^l_m Y^l_m` on any S² grid with at least the coefficient bandwidth.
pub fn sht_synthesize(coeffs: &ShtCoeffs, grid: &QuadratureGrid) -> Result<Vec<Vec<C>>> {
    check_fits(grid, Space::S2, coeffs.bandwidth)?;
    let t = tables(grid.bandwidth());
    let na = grid.axis_len();
    let b = coeffs.bandwidth as i64;
    Ok(coeffs
        .coeffs
        .par_iter()
        .map(|ch| {
            let mut out = vec![ZERO; grid.len()];
            for j in 0..na {
                // Per-m sums over degree, then the α synthesis.
                let g: Vec<C> = (-(b - 1)..b)
                    .map(|m| {
                        let ma = m.unsigned_abs() as usize;
                        (ma..coeffs.bandwidth)
                            .map(|l| ch[l][(m + l as i64) as usize] * t.p[j][l][ma])
                            .sum::<C>()
                            * cs_sign(m)
                    })
                    .collect();
                for i in 0..na {
                    out[j * na + i] = (-(b - 1)..b)
                        .map(|m| g[(m + b - 1) as usize] * t.twiddle(m, i))
                        .sum();
                }
            }
            out
        })
        .collect())
}

/// Synthesis on the grid matching the coefficient bandwidth.
pub fn sht_inverse(coeffs: &ShtCoeffs) -> Result<Vec<Vec<C>>> {
    let grid = QuadratureGrid::new(Space::S2, coeffs.bandwidth)?;
    sht_synthesize(coeffs, &grid)
}

/// Pointwise synthesis, one value per channel.
pub fn sht_evaluate(coeffs: &ShtCoeffs, x: SpherePoint) -> Vec<C> {
    if coeffs.bandwidth == 0 {
        return vec![ZERO; coeffs.channels()];
    }
    let p = legendre_table(coeffs.bandwidth - 1, x.beta);
    coeffs
        .coeffs
        .iter()
        .map(|ch| {
            let mut s = ZERO;
            for (l, row) in ch.iter().enumerate() {
                let li = l as i64;
                for m in -li..=li {
                    let y = C::from_polar(p[l][m.unsigned_abs() as usize] * cs_sign(m), m as f64 * x.alpha);
                    s += row[(m + li) as usize] * y;
                }
            }
            s
        })
        .collect()
}

/// `f̂^l_{mn} = ∫ f(g) conj(D^l_{mn}(g)) dg`: γ-DFT, then α-DFT, then the β sum.
pub fn so3_ft_forward(grid: &QuadratureGrid, data: &[Vec<C>]) -> Result<SpectralBlocks> {
    grid.expect(Space::SO3, None)?;
    check_samples(grid, data)?;
    let b = grid.bandwidth();
    let t = tables(b);
    let na = grid.axis_len();
    let bi = b as i64;
    let blocks = data
        .par_iter()
        .map(|ch| {
            let mut out = SpectralBlocks::zeros(b, 1).blocks.pop().expect("one channel");
            for j in 0..na {
                // g1[i][n]: γ transform at each α.
                let g1: Vec<Vec<C>> = (0..na)
                    .map(|i| alpha_dft(&t, &ch[(j * na + i) * na..(j * na + i + 1) * na], b, 1))
                    .collect();
                let w = t.beta_weights[j];
                for n in -(bi - 1)..bi {
                    let col: Vec<C> = g1.iter().map(|r| r[(n + bi - 1) as usize]).collect();
                    let g2 = alpha_dft(&t, &col, b, 1);
                    for m in -(bi - 1)..bi {
                        let v = g2[(m + bi - 1) as usize] * w;
                        let lmin = m.abs().max(n.abs()) as usize;
                        for (l, blk) in out.iter_mut().enumerate().skip(lmin) {
                            let li = l as i64;
                            blk[((m + li) as usize, (n + li) as usize)] += v * t.dval(j, l, m, n);
                        }
                    }
                }
            }
            out
        })
        .collect();
    Ok(SpectralBlocks { bandwidth: b, blocks })
}

/// `f(g) = Σ_l (2l+1) tr(f̂^{lᵀ} D^l(g))` on an SO(3) grid of at least the block bandwidth.
pub fn so3_synthesize(spec: &SpectralBlocks, grid: &QuadratureGrid) -> Result<Vec<Vec<C>>> {
    check_fits(grid, Space::SO3, spec.bandwidth)?;
    let t = tables(grid.bandwidth());
    let na = grid.axis_len();
    let b = spec.bandwidth as i64;
    Ok(spec
        .blocks
        .par_iter()
        .map(|ch| {
            let mut out = vec![ZERO; grid.len()];
            for j in 0..na {
                // h[m][n] = Σ_l (2l+1) f̂^l_{mn} d^l_{mn}(β_j)
                let mut h = vec![vec![ZERO; (2 * b - 1) as usize]; (2 * b - 1) as usize];
                for (l, blk) in ch.iter().enumerate() {
                    let li = l as i64;
                    let s = (2 * l + 1) as f64;
                    for m in -li..=li {
                        for n in -li..=li {
                            h[(m + b - 1) as usize][(n + b - 1) as usize] +=
                                blk[((m + li) as usize, (n + li) as usize)] * (s * t.dval(j, l, m, n));
                        }
                    }
                }
                for i in 0..na {
                    // q[n] = Σ_m h[m][n] e^{-imα_i}
                    let q: Vec<C> = (-(b - 1)..b)
                        .map(|n| {
                            (-(b - 1)..b)
                                .map(|m| h[(m + b - 1) as usize][(n + b - 1) as usize] * t.twiddle(-m, i))
                                .sum()
                        })
                        .collect();
                    for k in 0..na {
                        out[(j * na + i) * na + k] = (-(b - 1)..b)
                            .map(|n| q[(n + b - 1) as usize] * t.twiddle(-n, k))
                            .sum();
                    }
                }
            }
            out
        })
        .collect())
}

/// Inverse transform on the grid matching the block bandwidth.
pub fn so3_ft_inverse(spec: &SpectralBlocks) -> Result<Vec<Vec<C>>> {
    let grid = QuadratureGrid::new(Space::SO3, spec.bandwidth)?;
    so3_synthesize(spec, &grid)
}

/// `out(α, β) = Σ_k w_k e^{imγ_k} f(α, β, γ_k)`, returned on the S² grid of the same bandwidth.
pub fn fiber_dft(grid: &QuadratureGrid, data: &[Vec<C>], m: i64) -> Result<Vec<Vec<C>>> {
    grid.expect(Space::SO3, None)?;
    check_samples(grid, data)?;
    check_order(m, grid.bandwidth())?;
    let t = tables(grid.bandwidth());
    let na = grid.axis_len();
    Ok(data
        .iter()
        .map(|ch| {
            ch.chunks(na)
                .map(|fiber| {
                    fiber
                        .iter()
                        .enumerate()
                        .map(|(k, &v)| v * t.twiddle(m, k))
                        .sum::<C>()
                        / na as f64
                })
                .collect()
        })
        .collect())
}

/// Analysis of an order-`k` field: `a^l_m = ∫_{S²} f(α, β) e^{imα} d^l_{mk}(β)`,
/// i.e. column `k` of the spectrum of its lift, truncated to `l < bandwidth`.
pub fn spin_analysis(grid: &QuadratureGrid, data: &[Vec<C>], k: i64, bandwidth: usize) -> Result<ColumnSpectrum> {
    check_fits(grid, Space::S2, bandwidth)?;
    check_samples(grid, data)?;
    check_order(k, bandwidth)?;
    let t = tables(grid.bandwidth());
    let na = grid.axis_len();
    let lmin = k.unsigned_abs() as usize;
    let coeffs = data
        .par_iter()
        .map(|ch| {
            let mut out = zero_triangle(bandwidth);
            for j in 0..na {
                let f = alpha_dft(&t, &ch[j * na..(j + 1) * na], bandwidth, 1);
                let w = t.beta_weights[j];
                for (l, row) in out.iter_mut().enumerate().skip(lmin) {
                    let li = l as i64;
                    for m in -li..=li {
                        row[(m + li) as usize] += f[(m + bandwidth as i64 - 1) as usize] * (w * t.dval(j, l, m, k));
                    }
                }
            }
            out
        })
        .collect();
    Ok(ColumnSpectrum {
        bandwidth,
        order: k,
        coeffs,
    })
}

/// `f(α, β) = Σ_{l ≥ |k|} (2l+1) Σ_m a^l_m e^{-imα} d^l_{mk}(β)` on an S² grid.
pub fn spin_synthesis(spec: &ColumnSpectrum, grid: &QuadratureGrid) -> Result<Vec<Vec<C>>> {
    check_fits(grid, Space::S2, spec.bandwidth)?;
    check_order(spec.order, spec.bandwidth)?;
    let t = tables(grid.bandwidth());
    let na = grid.axis_len();
    let b = spec.bandwidth as i64;
    let k = spec.order;
    Ok(spec
        .coeffs
        .par_iter()
        .map(|ch| {
            let mut out = vec![ZERO; grid.len()];
            for j in 0..na {
                let g: Vec<C> = (-(b - 1)..b)
                    .map(|m| {
                        let lmin = m.abs().max(k.abs()) as usize;
                        (lmin..spec.bandwidth)
                            .map(|l| ch[l][(m + l as i64) as usize] * ((2 * l + 1) as f64 * t.dval(j, l, m, k)))
                            .sum()
                    })
                    .collect();
                for i in 0..na {
                    out[j * na + i] = (-(b - 1)..b)
                        .map(|m| g[(m + b - 1) as usize] * t.twiddle(-m, i))
                        .sum();
                }
            }
            out
        })
        .collect())
}

/// Pointwise evaluation of an order-`k` field from its column spectrum.
pub fn spin_evaluate(spec: &ColumnSpectrum, x: SpherePoint) -> Vec<C> {
    if spec.bandwidth == 0 {
        return vec![ZERO; spec.channels()];
    }
    let d = wigner_d_all(spec.bandwidth - 1, x.beta);
    let k = spec.order;
    spec.coeffs
        .iter()
        .map(|ch| {
            let mut s = ZERO;
            for l in spec.min_degree()..spec.bandwidth {
                let li = l as i64;
                for m in -li..=li {
                    let v = d[l][((m + li) as usize, (k + li) as usize)] * (2 * l + 1) as f64;
                    s += ch[l][(m + li) as usize] * C::from_polar(v, -(m as f64) * x.alpha);
                }
            }
            s
        })
        .collect()
}
