use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{PointCloud, SE3KernelBasis};
use crate::error::{Error, Result};
use crate::nonlin::{point_sphere_nonlin, ActivationSpec, PointNonlinOptions, SphereFeatures};

/// One kernel basis element with its channel mixing, `out_channels × in_channels`.
#[derive(Debug, Clone, PartialEq)]
pub struct TfnTerm {
    pub basis: SE3KernelBasis,
    pub weights: DMatrix<f64>,
}

/// A point convolution: the sum of its terms over neighbors closer than `radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct TfnConv {
    pub terms: Vec<TfnTerm>,
    pub radius: f64,
}

impl TfnConv {
    /// Output channel count per output degree.
    fn out_layout(&self, cloud: &PointCloud) -> Result<BTreeMap<usize, usize>> {
        if !(self.radius > 0.0) {
            return Err(Error::Shape("neighbor radius must be positive".into()));
        }
        let mut out = BTreeMap::new();
        for term in &self.terms {
            let (li, lo) = (term.basis.l_in(), term.basis.l_out());
            match cloud.channels(li) {
                Some(c) if c == term.weights.ncols() => {}
                Some(c) => {
                    return Err(Error::Shape(format!(
                        "term {li}->{lo}: weights take {} channels, cloud has {c}",
                        term.weights.ncols()
                    )))
                }
                None if cloud.is_empty() => {}
                None => return Err(Error::Shape(format!("cloud has no degree {li} features"))),
            }
            let co = term.weights.nrows();
            if *out.entry(lo).or_insert(co) != co {
                return Err(Error::Shape(format!("terms into degree {lo} disagree on channel count")));
            }
        }
        Ok(out)
    }
}

/// Sorted indices `j ≠ i` with `|x_j − x_i| < radius`.
fn neighbors(cloud: &PointCloud, radius: f64) -> Vec<Vec<usize>> {
    let p = &cloud.positions;
    (0..p.len())
        .into_par_iter()
        .map(|i| (0..p.len()).filter(|&j| j != i && (p[j] - p[i]).norm() < radius).collect())
        .collect()
}

/// `f_out^{l_out}(x_i) = Σ_terms Σ_{j ∈ N(i)} K(x_j − x_i) f_in^{l_in}(x_j) Wᵀ`.
/// Points without neighbors get zero output.
pub fn tfn_point_conv(cloud: &PointCloud, conv: &TfnConv) -> Result<PointCloud> {
    cloud.validate()?;
    let layout = conv.out_layout(cloud)?;
    let nbrs = neighbors(cloud, conv.radius);
    let p = &cloud.positions;
    let features = (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let mut acc: SphereFeatures =
                layout.iter().map(|(&l, &c)| (l, DMatrix::zeros(2 * l + 1, c))).collect();
            for term in &conv.terms {
                let (li, lo) = (term.basis.l_in(), term.basis.l_out());
                let mut s = DMatrix::zeros(2 * lo + 1, term.weights.ncols());
                for &j in &nbrs[i] {
                    s += term.basis.eval(&(p[j] - p[i])) * &cloud.features[j][&li];
                }
                *acc.get_mut(&lo).unwrap() += s * term.weights.transpose();
            }
            acc
        })
        .collect();
    PointCloud::new(cloud.positions.clone(), features)
}

/// Per-point linear map on each degree, `f^l ↦ f^l W_lᵀ`. Degrees without a weight are dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelfInteraction {
    pub weights: BTreeMap<usize, DMatrix<f64>>,
}

impl SelfInteraction {
    pub fn apply(&self, cloud: &PointCloud) -> Result<PointCloud> {
        for (l, w) in &self.weights {
            if !cloud.is_empty() && cloud.channels(*l) != Some(w.ncols()) {
                return Err(Error::Shape(format!("self-interaction weights for degree {l} do not match the cloud")));
            }
        }
        let features = cloud
            .features
            .iter()
            .map(|f| self.weights.iter().map(|(l, w)| (*l, &f[l] * w.transpose())).collect())
            .collect();
        PointCloud::new(cloud.positions.clone(), features)
    }
}

/// Convolution, optional self-interaction added to it, then the sphere nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub struct Se3LayerSpec {
    pub conv: TfnConv,
    pub self_interaction: Option<SelfInteraction>,
    pub activation: ActivationSpec,
    pub out_orders: Vec<usize>,
    pub nonlin: PointNonlinOptions,
}

pub fn se3_layer(cloud: &PointCloud, spec: &Se3LayerSpec) -> Result<PointCloud> {
    let mut out = tfn_point_conv(cloud, &spec.conv)?;
    if let Some(si) = &spec.self_interaction {
        let s = si.apply(cloud)?;
        for (f, g) in out.features.iter_mut().zip(&s.features) {
            for (l, b) in g {
                match f.get_mut(l) {
                    Some(a) if a.shape() == b.shape() => *a += b,
                    Some(_) => return Err(Error::Shape(format!("self-interaction degree {l} has the wrong shape"))),
                    None => {
                        f.insert(*l, b.clone());
                    }
                }
            }
        }
    }
    let features = point_sphere_nonlin(&out.features, &spec.activation, &spec.out_orders, spec.nonlin)?;
    PointCloud::new(out.positions, features)
}
