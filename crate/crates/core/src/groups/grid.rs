//! Equiangular quadrature grids with normalized Haar weights.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    S2,
    SO3,
    Circle,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::S2 => f.write_str("S2"),
            Space::SO3 => f.write_str("SO3"),
            Space::Circle => f.write_str("Circle"),
        }
    }
}

/// One sample location. Unused coordinates are zero (`beta, gamma` on the circle,
/// `gamma` on the sphere).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridNode {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Serializable identity of a grid; the nodes and weights are regenerated from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub space: Space,
    pub bandwidth: usize,
}

/// Driscoll–Healy style sampling with `2B` points per angular axis.
///
/// Node order is `beta`-major, then `alpha`, then `gamma`, so every `gamma`
/// fiber of an SO(3) grid is contiguous and an S² grid is the `gamma = 0`
/// slice of the SO(3) grid with the same bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    space: Space,
    bandwidth: usize,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    beta_weights: Vec<f64>,
    nodes: Vec<GridNode>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(space: Space, bandwidth: usize) -> Result<Self> {
        if bandwidth == 0 {
            return Err(Error::ZeroBandwidth);
        }
        let n = 2 * bandwidth;
        let alphas: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let betas: Vec<f64> = (0..n)
            .map(|j| PI * (2 * j + 1) as f64 / (4 * bandwidth) as f64)
            .collect();
        let beta_weights = dh_weights(bandwidth);
        let uniform = 1.0 / n as f64;

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match space {
            Space::Circle => {
                for &alpha in &alphas {
                    nodes.push(GridNode { alpha, beta: 0.0, gamma: 0.0 });
                    weights.push(uniform);
                }
            }
            Space::S2 => {
                for (&beta, &wb) in betas.iter().zip(&beta_weights) {
                    for &alpha in &alphas {
                        nodes.push(GridNode { alpha, beta, gamma: 0.0 });
                        weights.push(wb * uniform);
                    }
                }
            }
            Space::SO3 => {
                for (&beta, &wb) in betas.iter().zip(&beta_weights) {
                    for &alpha in &alphas {
                        for &gamma in &alphas {
                            nodes.push(GridNode { alpha, beta, gamma });
                            weights.push(wb * uniform * uniform);
                        }
                    }
                }
            }
        }
        Ok(Self {
            space,
            bandwidth,
            alphas,
            betas,
            beta_weights,
            nodes,
            weights,
        })
    }

    pub fn from_descriptor(d: GridDescriptor) -> Result<Self> {
        Self::new(d.space, d.bandwidth)
    }

    pub fn descriptor(&self) -> GridDescriptor {
        GridDescriptor {
            space: self.space,
            bandwidth: self.bandwidth,
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn nodes(&self) -> &[GridNode] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Samples per angular axis (`2B`).
    pub fn axis_len(&self) -> usize {
        2 * self.bandwidth
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Same sample positions as `alphas`; kept separate for readability at call sites.
    pub fn gammas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Colatitude weights normalized to sum to one.
    pub fn beta_weights(&self) -> &[f64] {
        &self.beta_weights
    }

    /// Weighted sum of `f` over the nodes.
    pub fn integrate<F: Fn(&GridNode) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(n, w)| w * f(n))
            .sum()
    }

    pub(crate) fn expect(&self, space: Space, bandwidth: Option<usize>) -> Result<()> {
        let ok = self.space == space && bandwidth.is_none_or(|b| b == self.bandwidth);
        if ok {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                expected: match bandwidth {
                    Some(b) => format!("{space} grid with bandwidth {b}"),
                    None => format!("{space} grid"),
                },
                found: format!("{} grid with bandwidth {}", self.space, self.bandwidth),
            })
        }
    }
}

/// Colatitude weights for `2B` equiangular samples, exact for polynomials in
/// `cos β` of degree below `2B` against `sin β dβ / 2`.
fn dh_weights(bandwidth: usize) -> Vec<f64> {
    let b = bandwidth as f64;
    (0..2 * bandwidth)
        .map(|j| {
            let t = (2 * j + 1) as f64 * PI / (4.0 * b);
            let s: f64 = (0..bandwidth)
                .map(|k| {
                    let o = (2 * k + 1) as f64;
                    (o * t).sin() / o
                })
                .sum();
            t.sin() * s / b
        })
        .collect()
}
