//! Coefficient containers.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spherical-harmonic coefficients `f^l_m`, indexed `[channel][l][m + l]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShtCoeffs {
    pub bandwidth: usize,
    pub coeffs: Vec<Vec<Vec<Complex64>>>,
}

impl ShtCoeffs {
    pub fn zeros(bandwidth: usize, channels: usize) -> Self {
        Self {
            bandwidth,
            coeffs: vec![zero_triangle(bandwidth); channels],
        }
    }

    pub fn channels(&self) -> usize {
        self.coeffs.len()
    }

    pub fn get(&self, c: usize, l: usize, m: i64) -> Complex64 {
        self.coeffs[c][l][(m + l as i64) as usize]
    }

    pub fn set(&mut self, c: usize, l: usize, m: i64, v: Complex64) {
        self.coeffs[c][l][(m + l as i64) as usize] = v;
    }
}

pub(crate) fn zero_triangle(bandwidth: usize) -> Vec<Vec<Complex64>> {
    (0..bandwidth)
        .map(|l| vec![Complex64::new(0.0, 0.0); 2 * l + 1])
        .collect()
}

/// Fourier blocks `f̂^l`, `l < B`, per channel. Entry `(m + l, n + l)` of block
/// `l` is `f̂^l_{mn}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBlocks {
    pub bandwidth: usize,
    pub blocks: Vec<Vec<DMatrix<Complex64>>>,
}

#[derive(Serialize, Deserialize)]
struct BlocksFile {
    format_version: u32,
    bandwidth: usize,
    channels: usize,
    /// `[channel][l][row][col]`
    blocks: Vec<Vec<Vec<Vec<Complex64>>>>,
}

impl SpectralBlocks {
    pub fn zeros(bandwidth: usize, channels: usize) -> Self {
        let one: Vec<DMatrix<Complex64>> = (0..bandwidth)
            .map(|l| DMatrix::zeros(2 * l + 1, 2 * l + 1))
            .collect();
        Self {
            bandwidth,
            blocks: vec![one; channels],
        }
    }

    pub fn channels(&self) -> usize {
        self.blocks.len()
    }

    pub fn get(&self, c: usize, l: usize, m: i64, n: i64) -> Complex64 {
        let li = l as i64;
        self.blocks[c][l][((m + li) as usize, (n + li) as usize)]
    }

    pub fn set(&mut self, c: usize, l: usize, m: i64, n: i64, v: Complex64) {
        let li = l as i64;
        self.blocks[c][l][((m + li) as usize, (n + li) as usize)] = v;
    }

    /// `Σ_l (2l+1) ‖f̂^l‖²` summed over channels; equals the squared L² norm.
    pub fn weighted_energy(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|ch| ch.iter().enumerate())
            .map(|(l, b)| (2 * l + 1) as f64 * b.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Weighted energy outside column `n = k`.
    pub fn off_column_energy(&self, k: i64) -> f64 {
        let mut e = 0.0;
        for ch in &self.blocks {
            for (l, b) in ch.iter().enumerate() {
                let li = l as i64;
                for c in 0..b.ncols() {
                    if c as i64 - li == k {
                        continue;
                    }
                    e += (2 * l + 1) as f64 * b.column(c).iter().map(|z| z.norm_sqr()).sum::<f64>();
                }
            }
        }
        e
    }

    /// Column `n = k` as a column spectrum, discarding everything else.
    pub fn column(&self, k: i64) -> Result<ColumnSpectrum> {
        check_order(k, self.bandwidth)?;
        let mut out = ColumnSpectrum::zeros(self.bandwidth, k, self.channels());
        for (c, ch) in self.blocks.iter().enumerate() {
            for l in k.unsigned_abs() as usize..self.bandwidth {
                let li = l as i64;
                for m in -li..=li {
                    out.coeffs[c][l][(m + li) as usize] = ch[l][((m + li) as usize, (k + li) as usize)];
                }
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = BlocksFile {
            format_version: 1,
            bandwidth: self.bandwidth,
            channels: self.channels(),
            blocks: self
                .blocks
                .iter()
                .map(|ch| {
                    ch.iter()
                        .map(|b| (0..b.nrows()).map(|r| b.row(r).iter().copied().collect()).collect())
                        .collect()
                })
                .collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: BlocksFile = serde_json::from_str(s)?;
        if file.format_version != 1 {
            return Err(Error::Parse(format!(
                "unsupported format_version {} (expected 1)",
                file.format_version
            )));
        }
        if file.blocks.len() != file.channels {
            return Err(Error::Shape("channel count does not match blocks".into()));
        }
        let mut blocks = Vec::with_capacity(file.channels);
        for ch in file.blocks {
            if ch.len() != file.bandwidth {
                return Err(Error::Shape(format!("expected {} degrees, found {}", file.bandwidth, ch.len())));
            }
            let mut out = Vec::with_capacity(ch.len());
            for (l, rows) in ch.into_iter().enumerate() {
                let n = 2 * l + 1;
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Shape(format!("block {l} must be {n}×{n}")));
                }
                out.push(DMatrix::from_fn(n, n, |r, c| rows[r][c]));
            }
            blocks.push(out);
        }
        Ok(Self {
            bandwidth: file.bandwidth,
            blocks,
        })
    }
}

/// The single nonzero column `n = k` of the spectrum of a lifted order-`k`
/// field: `a^l_m = f̂^l_{mk}`, indexed `[channel][l][m + l]`. Degrees
/// `l < |k|` are structurally zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpectrum {
    pub bandwidth: usize,
    pub order: i64,
    pub coeffs: Vec<Vec<Vec<Complex64>>>,
}

impl ColumnSpectrum {
    pub fn zeros(bandwidth: usize, order: i64, channels: usize) -> Self {
        Self {
            bandwidth,
            order,
            coeffs: vec![zero_triangle(bandwidth); channels],
        }
    }

    pub fn channels(&self) -> usize {
        self.coeffs.len()
    }

    pub fn get(&self, c: usize, l: usize, m: i64) -> Complex64 {
        self.coeffs[c][l][(m + l as i64) as usize]
    }

    /// Lowest degree that can carry energy.
    pub fn min_degree(&self) -> usize {
        self.order.unsigned_abs() as usize
    }

    /// Embeds the column into full blocks.
    pub fn to_blocks(&self) -> SpectralBlocks {
        let mut out = SpectralBlocks::zeros(self.bandwidth, self.channels());
        for (c, ch) in self.coeffs.iter().enumerate() {
            for l in self.min_degree()..self.bandwidth {
                let li = l as i64;
                for m in -li..=li {
                    out.set(c, l, m, self.order, ch[l][(m + li) as usize]);
                }
            }
        }
        out
    }

    /// Keeps degrees `l < bandwidth`, or pads with zeros.
    pub fn with_bandwidth(&self, bandwidth: usize) -> Self {
        let mut out = Self::zeros(bandwidth, self.order, self.channels());
        for (c, ch) in self.coeffs.iter().enumerate() {
            for l in 0..bandwidth.min(self.bandwidth) {
                out.coeffs[c][l].clone_from(&ch[l]);
            }
        }
        out
    }

    pub fn weighted_energy(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|ch| ch.iter().enumerate())
            .map(|(l, v)| (2 * l + 1) as f64 * v.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    }
}

pub(crate) fn check_order(k: i64, bandwidth: usize) -> Result<()> {
    if k.unsigned_abs() as usize >= bandwidth {
        Err(Error::OrderOutOfBand { order: k, bandwidth })
    } else {
        Ok(())
    }
}
