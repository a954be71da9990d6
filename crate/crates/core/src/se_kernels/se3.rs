use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;

use super::RadialProfile;
use crate::error::{Error, Result};
use crate::groups::SpherePoint;
use crate::harmonics::{clebsch_gordan, real_basis_change, sph_harm_all};

type C = Complex64;

/// One element of the spatial SE(3) kernel basis from degree `l_in` to `l_out`
/// through the angular degree `t`:
/// `K(x)_{ij} = C_t(|x|) Σ_m ⟨t m l_in j | l_out i⟩ conj(Y^t_m(x̂))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SE3KernelBasis {
    l_in: usize,
    l_out: usize,
    t: usize,
    radial: RadialProfile,
    // cg[(i, j)][m + t]
    cg: Vec<Vec<f64>>,
    q_out: DMatrix<C>,
    q_in_h: DMatrix<C>,
    phase: C,
}

impl SE3KernelBasis {
    pub fn new(l_in: usize, l_out: usize, t: usize, radial: RadialProfile) -> Result<Self> {
        if t < l_in.abs_diff(l_out) || t > l_in + l_out {
            return Err(Error::Shape(format!(
                "angular degree {t} outside |{l_in}-{l_out}|..={}",
                l_in + l_out
            )));
        }
        radial.validate()?;
        let (no, ni) = (2 * l_out + 1, 2 * l_in + 1);
        let (ti, li, lo) = (t as i64, l_in as i64, l_out as i64);
        let mut cg = vec![vec![0.0; 2 * t + 1]; no * ni];
        for i in -lo..=lo {
            for j in -li..=li {
                let m = i - j;
                if m.abs() <= ti {
                    cg[(i + lo) as usize * ni + (j + li) as usize][(m + ti) as usize] =
                        clebsch_gordan(t, m, l_in, j, l_out, i);
                }
            }
        }
        // The real form of the complex kernel is real up to i^(l_in + t + l_out).
        let phase = match (l_in + t + l_out) % 4 {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, -1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, 1.0),
        };
        Ok(Self {
            l_in,
            l_out,
            t,
            radial,
            cg,
            q_out: real_basis_change(l_out),
            q_in_h: real_basis_change(l_in).adjoint(),
            phase,
        })
    }

    /// Every basis element for the pair `(l_in, l_out)`, one per admissible `t`.
    pub fn all_for(l_in: usize, l_out: usize, radial: impl Fn(usize) -> RadialProfile) -> Result<Vec<Self>> {
        (l_in.abs_diff(l_out)..=l_in + l_out).map(|t| Self::new(l_in, l_out, t, radial(t))).collect()
    }

    pub fn l_in(&self) -> usize {
        self.l_in
    }

    pub fn l_out(&self) -> usize {
        self.l_out
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn radial(&self) -> &RadialProfile {
        &self.radial
    }

    /// Kernel in the complex (`Y^l_m`) basis. Zero at the origin unless `t = 0`.
    pub fn eval_complex(&self, x: &Vector3<f64>) -> DMatrix<C> {
        let (no, ni) = (2 * self.l_out + 1, 2 * self.l_in + 1);
        let r = x.norm();
        let c = self.radial.eval(r);
        let mut k = DMatrix::zeros(no, ni);
        if r == 0.0 && self.t > 0 {
            return k;
        }
        let y = if r == 0.0 {
            vec![C::new(1.0, 0.0)]
        } else {
            sph_harm_all(self.t, SpherePoint::from_vector(x)).swap_remove(self.t)
        };
        for i in 0..no {
            for j in 0..ni {
                let s: C = self.cg[i * ni + j].iter().zip(&y).map(|(w, y)| *w * y.conj()).sum();
                k[(i, j)] = s * c;
            }
        }
        k
    }

    /// Kernel in the real basis, `(2 l_out + 1) × (2 l_in + 1)`.
    pub fn eval(&self, x: &Vector3<f64>) -> DMatrix<f64> {
        (&self.q_out * self.eval_complex(x) * &self.q_in_h * self.phase).map(|z| z.re)
    }

    #[cfg(test)]
    /// Largest imaginary part of the phased real form; zero when the phase is right.
    pub(crate) fn imag_residual(&self, x: &Vector3<f64>) -> f64 {
        (&self.q_out * self.eval_complex(x) * &self.q_in_h * self.phase)
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }
}
