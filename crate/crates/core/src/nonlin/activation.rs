//! Pointwise activation functions and small per-point MLPs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind {
    Relu,
    Gelu,
    Tanh,
    Identity,
    PerPointMlp,
}

impl ActivationKind {
    /// Scalar map. `PerPointMlp` is not scalar and acts as the identity here.
    pub fn apply(self, x: f64) -> f64 {
        match self {
            ActivationKind::Relu => x.max(0.0),
            ActivationKind::Gelu => 0.5 * x * (1.0 + statrs::function::erf::erf(x * std::f64::consts::FRAC_1_SQRT_2)),
            ActivationKind::Tanh => x.tanh(),
            ActivationKind::Identity | ActivationKind::PerPointMlp => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    /// `out × in`, row-major.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect()
    }
}

/// Dense layers with `hidden` applied between them; the last layer is linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<DenseLayer>,
    pub hidden: ActivationKind,
}

impl Mlp {
    pub fn in_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.weights.first().map_or(0, |r| r.len()))
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.bias.len())
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Shape("an MLP needs at least one layer".into()));
        }
        if self.hidden == ActivationKind::PerPointMlp {
            return Err(Error::Shape("hidden activation must be scalar".into()));
        }
        let mut dim = self.in_dim();
        for (i, l) in self.layers.iter().enumerate() {
            if l.weights.len() != l.bias.len() || l.weights.iter().any(|r| r.len() != dim) {
                return Err(Error::Shape(format!("layer {i} has inconsistent shape")));
            }
            dim = l.bias.len();
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        for (i, l) in self.layers.iter().enumerate() {
            v = l.apply(&v);
            if i + 1 < self.layers.len() {
                v.iter_mut().for_each(|z| *z = self.hidden.apply(*z));
            }
        }
        v
    }
}

/// The nonlinearity `ξ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivationSpec {
    pub kind: ActivationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mlp: Option<Mlp>,
}

impl ActivationSpec {
    pub fn new(kind: ActivationKind) -> Self {
        Self { kind, mlp: None }
    }

    pub fn mlp(mlp: Mlp) -> Self {
        Self {
            kind: ActivationKind::PerPointMlp,
            mlp: Some(mlp),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.kind, &self.mlp) {
            (ActivationKind::PerPointMlp, Some(m)) => m.validate(),
            (ActivationKind::PerPointMlp, None) => Err(Error::Shape("per_point_mlp needs weights".into())),
            _ => Ok(()),
        }
    }

    /// Output channel count for a given input channel count.
    pub fn out_channels(&self, channels: usize) -> Result<usize> {
        self.validate()?;
        match &self.mlp {
            Some(m) if self.kind == ActivationKind::PerPointMlp => {
                if m.in_dim() != channels {
                    return Err(Error::Shape(format!("MLP expects {} channels, got {channels}", m.in_dim())));
                }
                Ok(m.out_dim())
            }
            _ => Ok(channels),
        }
    }

    /// Applies `ξ` to one node's real channel vector.
    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        match (&self.kind, &self.mlp) {
            (ActivationKind::PerPointMlp, Some(m)) => m.apply(x),
            (k, _) => x.iter().map(|&v| k.apply(v)).collect(),
        }
    }

    /// Applies `ξ` to real and imaginary parts separately.
    pub fn apply_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        let re: Vec<f64> = x.iter().map(|z| z.re).collect();
        let im: Vec<f64> = x.iter().map(|z| z.im).collect();
        self.apply_real(&re)
            .into_iter()
            .zip(self.apply_real(&im))
            .map(|(a, b)| Complex64::new(a, b))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let a: Self = serde_json::from_str(s)?;
        a.validate()?;
        Ok(a)
    }
}
