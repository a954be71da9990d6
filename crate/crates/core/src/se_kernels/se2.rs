use nalgebra::Vector2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::RadialProfile;

/// Planar kernel `κ(x) = e^{i(m_out − m_in)φ} R(|x|)` mapping order `m_in` to `m_out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SE2KernelBasis {
    pub m_in: i64,
    pub m_out: i64,
    pub radial: RadialProfile,
}

impl SE2KernelBasis {
    pub fn new(m_in: i64, m_out: i64, radial: RadialProfile) -> Self {
        Self { m_in, m_out, radial }
    }

    /// At the origin the angle is undefined; the value there is `R(0)` when
    /// `m_in = m_out` and zero otherwise.
    pub fn eval(&self, x: &Vector2<f64>) -> Complex64 {
        let a = x.norm();
        let k = self.m_out - self.m_in;
        if a == 0.0 {
            let r = if k == 0 { self.radial.eval(0.0) } else { 0.0 };
            return Complex64::new(r, 0.0);
        }
        let phi = x.y.atan2(x.x);
        Complex64::from_polar(self.radial.eval(a), k as f64 * phi)
    }
}
