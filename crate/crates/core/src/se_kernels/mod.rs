//! Steerable kernels for rigid motions of the plane and of space, and a
//! point-cloud convolution built on the spatial SE(3) basis.

mod cloud;
mod se2;
mod se3;
mod tfn;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cloud::PointCloud;
pub use se2::SE2KernelBasis;
pub use se3::SE3KernelBasis;
pub use tfn::{se3_layer, tfn_point_conv, Se3LayerSpec, SelfInteraction, TfnConv, TfnTerm};

/// A radial profile sampled on increasing radii, linearly interpolated.
///
/// Below the first radius the first value is used; beyond the last radius the
/// profile is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let p = Self { radii, values };
        p.validate()?;
        Ok(p)
    }

    /// The constant profile `c` on `[0, r_max]`.
    pub fn constant(c: f64, r_max: f64) -> Self {
        Self {
            radii: vec![0.0, r_max],
            values: vec![c, c],
        }
    }

    /// Samples `f` at `n` evenly spaced radii on `[0, r_max]`.
    pub fn from_fn(n: usize, r_max: f64, f: impl Fn(f64) -> f64) -> Self {
        let radii: Vec<f64> = (0..n).map(|i| r_max * i as f64 / (n - 1).max(1) as f64).collect();
        let values = radii.iter().map(|&r| f(r)).collect();
        Self { radii, values }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.radii.len() != self.values.len() {
            return Err(Error::Shape("radial profile needs matching, nonempty radii and values".into()));
        }
        if self.radii[0] < 0.0 || self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Shape("radii must be nonnegative and strictly increasing".into()));
        }
        if self.radii.iter().chain(&self.values).any(|x| !x.is_finite()) {
            return Err(Error::Shape("radial profile must be finite".into()));
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n = self.radii.len();
        if r <= self.radii[0] {
            return self.values[0];
        }
        if r > self.radii[n - 1] {
            return 0.0;
        }
        let k = self.radii.partition_point(|&x| x < r);
        let (r0, r1) = (self.radii[k - 1], self.radii[k]);
        let w = (r - r0) / (r1 - r0);
        (1.0 - w) * self.values[k - 1] + w * self.values[k]
    }
}
