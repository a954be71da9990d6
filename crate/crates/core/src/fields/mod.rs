//! Fields on S² with SO(2) field types, functions on SO(3), and the
//! lifting isomorphism between them.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{GroupElement, QuadratureGrid, Rotation3, Space};
use crate::harmonics::wigner_D_all;
use crate::transforms::{
    check_order, so3_ft_forward, so3_synthesize, spin_analysis, spin_synthesis, ColumnSpectrum, SpectralBlocks,
};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stabilizer {
    SO2,
    SO3,
}

/// Field type: an SO(2) order `m` (irrep `e^{imθ}`) or an SO(3) degree `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldType {
    pub stabilizer: Stabilizer,
    pub order: i64,
}

impl FieldType {
    pub fn so2(order: i64) -> Self {
        Self {
            stabilizer: Stabilizer::SO2,
            order,
        }
    }

    pub fn so3(degree: usize) -> Self {
        Self {
            stabilizer: Stabilizer::SO3,
            order: degree as i64,
        }
    }

    pub fn dimension(&self) -> usize {
        match self.stabilizer {
            Stabilizer::SO2 => 1,
            Stabilizer::SO3 => 2 * self.order.unsigned_abs() as usize + 1,
        }
    }

    /// `ρ(θ) = e^{imθ}` for SO(2) types.
    pub fn so2_character(&self, theta: f64) -> C {
        C::from_polar(1.0, self.order as f64 * theta)
    }
}

/// Channelled samples of an SO(2)-typed field on an S² grid, `samples[channel][node]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    pub grid: QuadratureGrid,
    pub field_type: FieldType,
    pub samples: Vec<Vec<C>>,
}

impl TensorField {
    pub fn new(grid: QuadratureGrid, field_type: FieldType, samples: Vec<Vec<C>>) -> Result<Self> {
        grid.expect(Space::S2, None)?;
        if field_type.stabilizer != Stabilizer::SO2 {
            return Err(Error::Shape("S² fields carry SO(2) field types".into()));
        }
        if samples.is_empty() {
            return Err(Error::Shape("a field needs at least one channel".into()));
        }
        for ch in &samples {
            if ch.len() != grid.len() {
                return Err(Error::Shape(format!("expected {} samples per channel, found {}", grid.len(), ch.len())));
            }
            if ch.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Shape("field samples must be finite".into()));
            }
        }
        Ok(Self {
            grid,
            field_type,
            samples,
        })
    }

    pub fn zeros(grid: QuadratureGrid, order: i64, channels: usize) -> Self {
        let n = grid.len();
        Self {
            grid,
            field_type: FieldType::so2(order),
            samples: vec![vec![C::new(0.0, 0.0); n]; channels],
        }
    }

    /// Synthesizes an order-`k` field from its column spectrum on `grid`.
    pub fn from_spectrum(spec: &ColumnSpectrum, grid: &QuadratureGrid) -> Result<Self> {
        Ok(Self {
            grid: grid.clone(),
            field_type: FieldType::so2(spec.order),
            samples: spin_synthesis(spec, grid)?,
        })
    }

    pub fn order(&self) -> i64 {
        self.field_type.order
    }

    pub fn channels(&self) -> usize {
        self.samples.len()
    }

    pub fn bandwidth(&self) -> usize {
        self.grid.bandwidth()
    }

    /// Column spectrum at the grid bandwidth.
    pub fn spectrum(&self) -> Result<ColumnSpectrum> {
        spin_analysis(&self.grid, &self.samples, self.order(), self.bandwidth())
    }

    /// Column spectrum truncated to `l < bandwidth`.
    pub fn spectrum_to(&self, bandwidth: usize) -> Result<ColumnSpectrum> {
        spin_analysis(&self.grid, &self.samples, self.order(), bandwidth)
    }
}

/// Samples of a function on an SO(3) grid, `samples[channel][node]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction {
    pub grid: QuadratureGrid,
    pub samples: Vec<Vec<C>>,
}

impl GroupFunction {
    pub fn new(grid: QuadratureGrid, samples: Vec<Vec<C>>) -> Result<Self> {
        grid.expect(Space::SO3, None)?;
        for ch in &samples {
            if ch.len() != grid.len() {
                return Err(Error::Shape(format!("expected {} samples per channel, found {}", grid.len(), ch.len())));
            }
        }
        Ok(Self { grid, samples })
    }

    pub fn channels(&self) -> usize {
        self.samples.len()
    }

    pub fn bandwidth(&self) -> usize {
        self.grid.bandwidth()
    }

    pub fn from_spectrum(spec: &SpectralBlocks, grid: &QuadratureGrid) -> Result<Self> {
        Ok(Self {
            grid: grid.clone(),
            samples: so3_synthesize(spec, grid)?,
        })
    }

    pub fn spectrum(&self) -> Result<SpectralBlocks> {
        so3_ft_forward(&self.grid, &self.samples)
    }

    /// Grid-aligned regular actions by index permutation:
    /// `F(Rz(-a)·g·Rz(c))` with `a = alpha_steps·π/B`, `c = gamma_steps·π/B`.
    pub fn shift_aligned(&self, alpha_steps: i64, gamma_steps: i64) -> Self {
        let n = self.grid.axis_len();
        let ni = n as i64;
        let samples = self
            .samples
            .iter()
            .map(|ch| {
                let mut out = ch.clone();
                for j in 0..n {
                    for i in 0..n {
                        let si = (i as i64 - alpha_steps).rem_euclid(ni) as usize;
                        for k in 0..n {
                            let sk = (k as i64 + gamma_steps).rem_euclid(ni) as usize;
                            out[(j * n + i) * n + k] = ch[(j * n + si) * n + sk];
                        }
                    }
                }
                out
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            samples,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid || self.channels() != other.channels() {
            return Err(Error::GridMismatch {
                expected: format!("{:?} with {} channels", self.grid.descriptor(), self.channels()),
                found: format!("{:?} with {} channels", other.grid.descriptor(), other.channels()),
            });
        }
        Ok(Self {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        })
    }
}

/// `e^{-ikγ_s}` on the fiber grid.
fn fiber_phase(k: i64, s: usize, n: usize) -> C {
    let r = (-k * s as i64).rem_euclid(n as i64);
    C::from_polar(1.0, TAU * r as f64 / n as f64)
}

fn rotation_of(g: &GroupElement) -> Result<Rotation3> {
    match g {
        GroupElement::So3(r) => Ok(*r),
        other => Err(Error::GroupMismatch("SO(3)", other.kind())),
    }
}

/// `conj(D^l(g))` applied to each degree of a column spectrum.
pub fn rotate_column(spec: &ColumnSpectrum, g: &Rotation3) -> ColumnSpectrum {
    if spec.bandwidth == 0 {
        return spec.clone();
    }
    let ds = wigner_D_all(spec.bandwidth - 1, g);
    let mut out = spec.clone();
    for (c, ch) in spec.coeffs.iter().enumerate() {
        for l in spec.min_degree()..spec.bandwidth {
            let d = &ds[l].entries;
            for (r, slot) in out.coeffs[c][l].iter_mut().enumerate() {
                *slot = (0..2 * l + 1).map(|p| d[(r, p)].conj() * ch[l][p]).sum();
            }
        }
    }
    out
}

/// `conj(D^l(g))·f̂^l` for every block: the spectral form of `F ↦ F(g⁻¹·)`.
pub fn rotate_blocks(spec: &SpectralBlocks, g: &Rotation3) -> SpectralBlocks {
    if spec.bandwidth == 0 {
        return spec.clone();
    }
    let ds = wigner_D_all(spec.bandwidth - 1, g);
    SpectralBlocks {
        bandwidth: spec.bandwidth,
        blocks: spec
            .blocks
            .iter()
            .map(|ch| {
                ch.iter()
                    .zip(&ds)
                    .map(|(b, d)| d.entries.map(|z| z.conj()) * b)
                    .collect::<Vec<DMatrix<C>>>()
            })
            .collect(),
    }
}

/// `(L_g f)(x) = ρ(h(g⁻¹, x)⁻¹) f(g⁻¹x)`, evaluated by spectral resampling.
pub fn induced_action(g: &GroupElement, f: &TensorField) -> Result<TensorField> {
    let r = rotation_of(g)?;
    check_order(f.order(), f.bandwidth())?;
    let spec = rotate_column(&f.spectrum()?, &r);
    TensorField::from_spectrum(&spec, &f.grid)
}

/// `(L_g F)(k) = F(g⁻¹k)` for a bandlimited function on SO(3).
pub fn regular_action(g: &GroupElement, f: &GroupFunction) -> Result<GroupFunction> {
    let r = rotation_of(g)?;
    GroupFunction::from_spectrum(&rotate_blocks(&f.spectrum()?, &r), &f.grid)
}

/// `f↑(α, β, γ) = e^{-ikγ} f(α, β)` on the SO(3) grid of the same bandwidth.
pub fn lift(f: &TensorField) -> GroupFunction {
    let grid = QuadratureGrid::new(Space::SO3, f.bandwidth()).expect("bandwidth ≥ 1");
    let n = grid.axis_len();
    let phases: Vec<C> = (0..n).map(|s| fiber_phase(f.order(), s, n)).collect();
    let samples = f
        .samples
        .iter()
        .map(|ch| ch.iter().flat_map(|&v| phases.iter().map(move |&p| v * p)).collect())
        .collect();
    GroupFunction { grid, samples }
}

/// Restriction to the `γ = 0` slice.
pub fn project(m: &GroupFunction, field_type: FieldType) -> Result<TensorField> {
    let grid = QuadratureGrid::new(Space::S2, m.bandwidth())?;
    let n = m.grid.axis_len();
    let samples = m.samples.iter().map(|ch| ch.iter().step_by(n).copied().collect()).collect();
    TensorField::new(grid, field_type, samples)
}

/// Mackey residual `max ‖m(g·Rz(γ_s)) − e^{-ikγ_s} m(g)‖` over nodes and grid-aligned `γ_s`.
pub fn is_mackey(m: &GroupFunction, field_type: FieldType, tol: f64) -> (bool, f64) {
    let n = m.grid.axis_len();
    let k = field_type.order;
    let mut worst: f64 = 0.0;
    for ch in &m.samples {
        for fiber in ch.chunks(n) {
            for s in 0..n {
                let p = fiber_phase(k, s, n);
                for (t, &v) in fiber.iter().enumerate() {
                    let moved = fiber[(t + s) % n];
                    worst = worst.max((moved - p * v).norm());
                }
            }
        }
    }
    (worst <= tol, worst)
}
