use std::collections::BTreeMap;

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::Rotation3;
use crate::harmonics::{real_wigner, wigner_D};
use crate::nonlin::SphereFeatures;

/// Points in space with real features per degree, in the real Wigner basis.
///
/// `features[p][&l]` is the `(2l+1) × channels` block of point `p`. Every point
/// carries the same degrees with the same channel counts.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub positions: Vec<Vector3<f64>>,
    pub features: Vec<SphereFeatures>,
}

#[derive(Serialize, Deserialize)]
struct CloudDoc {
    positions: Vec<[f64; 3]>,
    #[serde(default)]
    features: BTreeMap<usize, Vec<Vec<Vec<f64>>>>,
}

impl PointCloud {
    pub fn new(positions: Vec<Vector3<f64>>, features: Vec<SphereFeatures>) -> Result<Self> {
        let c = Self { positions, features };
        c.validate()?;
        Ok(c)
    }

    /// Positions with no features.
    pub fn from_positions(positions: Vec<Vector3<f64>>) -> Self {
        let n = positions.len();
        Self {
            positions,
            features: vec![SphereFeatures::new(); n],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.len() != self.positions.len() {
            return Err(Error::Shape(format!(
                "{} positions but {} feature sets",
                self.positions.len(),
                self.features.len()
            )));
        }
        if self.positions.iter().flat_map(|p| p.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Shape("positions must be finite".into()));
        }
        let Some(first) = self.features.first() else {
            return Ok(());
        };
        for f in &self.features {
            if f.len() != first.len() {
                return Err(Error::Shape("points carry different feature degrees".into()));
            }
            for (l, b) in f {
                let Some(r) = first.get(l) else {
                    return Err(Error::Shape(format!("degree {l} not declared on every point")));
                };
                if b.shape() != (2 * l + 1, r.ncols()) {
                    return Err(Error::Shape(format!(
                        "degree {l} block must be {}x{}, got {}x{}",
                        2 * l + 1,
                        r.ncols(),
                        b.nrows(),
                        b.ncols()
                    )));
                }
                if b.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Shape("features must be finite".into()));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Declared feature degrees.
    pub fn orders(&self) -> Vec<usize> {
        self.features.first().map(|f| f.keys().copied().collect()).unwrap_or_default()
    }

    pub fn channels(&self, l: usize) -> Option<usize> {
        self.features.first().and_then(|f| f.get(&l)).map(|b| b.ncols())
    }

    /// `x ↦ R x + t`, with every degree-`l` block multiplied by the real `D^l(R)`.
    pub fn rototranslate(&self, r: &Rotation3, t: &Vector3<f64>) -> Self {
        let ds: BTreeMap<usize, DMatrix<f64>> =
            self.orders().into_iter().map(|l| (l, real_wigner(&wigner_D(l, r)))).collect();
        Self {
            positions: self.positions.iter().map(|p| r.apply(p) + t).collect(),
            features: self
                .features
                .iter()
                .map(|f| f.iter().map(|(l, b)| (*l, &ds[l] * b)).collect())
                .collect(),
        }
    }

    /// JSON with `positions: [[x, y, z], ...]` and `features: {l: [point][2l+1][channel]}`.
    pub fn to_json(&self) -> Result<String> {
        let mut features = BTreeMap::new();
        for l in self.orders() {
            let per_point = self
                .features
                .iter()
                .map(|f| {
                    let b = &f[&l];
                    (0..b.nrows()).map(|r| b.row(r).iter().copied().collect()).collect()
                })
                .collect();
            features.insert(l, per_point);
        }
        let doc = CloudDoc {
            positions: self.positions.iter().map(|p| [p.x, p.y, p.z]).collect(),
            features,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: CloudDoc = serde_json::from_str(s)?;
        let n = doc.positions.len();
        let mut features = vec![SphereFeatures::new(); n];
        for (l, pts) in doc.features {
            if pts.len() != n {
                return Err(Error::Shape(format!("degree {l}: {} feature rows for {n} points", pts.len())));
            }
            for (p, rows) in pts.into_iter().enumerate() {
                let ch = rows.first().map_or(0, |r| r.len());
                if rows.len() != 2 * l + 1 || rows.iter().any(|r| r.len() != ch) {
                    return Err(Error::Shape(format!("degree {l}, point {p}: expected {} equal rows", 2 * l + 1)));
                }
                features[p].insert(l, DMatrix::from_fn(rows.len(), ch, |i, j| rows[i][j]));
            }
        }
        Self::new(doc.positions.iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect(), features)
    }

    /// Positions from XYZ-style text. Accepts the usual header (atom count then a
    /// comment line) followed by `symbol x y z` rows, or bare `x y z` rows.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn from_xyz(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().peekable();
        let mut expected = None;
        if let Some((_, first)) = lines.peek() {
            if let Ok(n) = first.trim().parse::<usize>() {
                expected = Some(n);
                lines.next();
                lines.next();
            }
        }
        let mut positions = Vec::new();
        for (i, line) in lines {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = t.split_whitespace().collect();
            if tokens.len() < 3 || tokens.len() > 4 {
                return Err(Error::Parse(format!("line {}: expected 3 coordinates, found {:?}", i + 1, t)));
            }
            let coords = &tokens[tokens.len() - 3..];
            let mut v = [0.0; 3];
            for (k, s) in coords.iter().enumerate() {
                v[k] = s
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Parse(format!("line {}, field {}: bad number {s:?}", i + 1, k + 1)))?;
            }
            positions.push(Vector3::new(v[0], v[1], v[2]));
        }
        if let Some(n) = expected {
            if n != positions.len() {
                return Err(Error::Parse(format!("header declares {n} atoms, found {}", positions.len())));
            }
        }
        Ok(Self::from_positions(positions))
    }
}
