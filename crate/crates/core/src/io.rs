//! On-disk field files and their CSV form.
//!
//! The JSON document is canonical. CSV puts one complex value per row, preceded
//! by a `#` metadata line so the conversion can be reversed.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldType, GroupFunction, TensorField};
use crate::groups::{QuadratureGrid, Space};
use crate::nonlin::SphereFeatures;
use crate::se_kernels::PointCloud;

type C = Complex64;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldSpace {
    S2,
    SO3,
    R3points,
}

impl FieldSpace {
    fn name(self) -> &'static str {
        match self {
            FieldSpace::S2 => "S2",
            FieldSpace::SO3 => "SO3",
            FieldSpace::R3points => "R3points",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "S2" => Some(FieldSpace::S2),
            "SO3" => Some(FieldSpace::SO3),
            "R3points" => Some(FieldSpace::R3points),
            _ => None,
        }
    }
}

/// A sampled field.
///
/// `data[channel][node][dim]` holds `[re, im]`. On `S2` each entry of
/// `field_orders` is one SO(2) order and `dim` runs over them. On `SO3`,
/// `field_orders` is empty and `dim` has length one. On `R3points` the nodes are
/// `positions`, `field_orders` lists degrees `l`, and `dim` runs over the
/// concatenated `2l+1` real components (imaginary parts zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldFile {
    pub format_version: u32,
    pub space: FieldSpace,
    #[serde(default)]
    pub bandwidth: usize,
    pub field_orders: Vec<i64>,
    pub channels: usize,
    pub data: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 3]>>,
}

fn pair(z: C) -> [f64; 2] {
    [z.re, z.im]
}

fn grid_for(space: FieldSpace, bandwidth: usize) -> Result<QuadratureGrid> {
    match space {
        FieldSpace::S2 => QuadratureGrid::new(Space::S2, bandwidth),
        FieldSpace::SO3 => QuadratureGrid::new(Space::SO3, bandwidth),
        FieldSpace::R3points => Err(Error::Shape("point sets have no quadrature grid".into())),
    }
}

impl FieldFile {
    /// SO(2)-typed fields on one sphere grid, one `dim` per field.
    pub fn from_fields(fields: &[TensorField]) -> Result<Self> {
        let first = fields.first().ok_or_else(|| Error::Shape("no fields to write".into()))?;
        for f in fields {
            if f.grid != first.grid || f.channels() != first.channels() {
                return Err(Error::Shape("fields must share grid and channel count".into()));
            }
        }
        let data = (0..first.channels())
            .map(|c| (0..first.grid.len()).map(|n| fields.iter().map(|f| pair(f.samples[c][n])).collect()).collect())
            .collect();
        Ok(Self {
            format_version: FORMAT_VERSION,
            space: FieldSpace::S2,
            bandwidth: first.bandwidth(),
            field_orders: fields.iter().map(|f| f.order()).collect(),
            channels: first.channels(),
            data,
            positions: None,
        })
    }

    pub fn from_group_function(g: &GroupFunction) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            space: FieldSpace::SO3,
            bandwidth: g.bandwidth(),
            field_orders: Vec::new(),
            channels: g.channels(),
            data: g.samples.iter().map(|ch| ch.iter().map(|z| vec![pair(*z)]).collect()).collect(),
            positions: None,
        }
    }

    /// Requires every degree of the cloud to have the same channel count.
    pub fn from_cloud(cloud: &PointCloud) -> Result<Self> {
        let orders = cloud.orders();
        let channels = match orders.first() {
            Some(&l) => cloud.channels(l).unwrap_or(0),
            None => 0,
        };
        if orders.iter().any(|&l| cloud.channels(l) != Some(channels)) {
            return Err(Error::Shape("all degrees need the same channel count".into()));
        }
        let data = (0..channels)
            .map(|c| {
                cloud
                    .features
                    .iter()
                    .map(|f| orders.iter().flat_map(|l| f[l].column(c).iter().map(|&x| [x, 0.0]).collect::<Vec<_>>()).collect())
                    .collect()
            })
            .collect();
        Ok(Self {
            format_version: FORMAT_VERSION,
            space: FieldSpace::R3points,
            bandwidth: 0,
            field_orders: orders.iter().map(|&l| l as i64).collect(),
            channels,
            data,
            positions: Some(cloud.positions.iter().map(|p| [p.x, p.y, p.z]).collect()),
        })
    }

    fn dims(&self) -> usize {
        match self.space {
            FieldSpace::S2 => self.field_orders.len(),
            FieldSpace::SO3 => 1,
            FieldSpace::R3points => self.field_orders.iter().map(|&l| 2 * l as usize + 1).sum(),
        }
    }

    fn nodes(&self) -> Result<usize> {
        match self.space {
            FieldSpace::R3points => Ok(self.positions.as_ref().map_or(0, |p| p.len())),
            s => Ok(grid_for(s, self.bandwidth)?.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format_version {} (this build reads version {FORMAT_VERSION})",
                self.format_version
            )));
        }
        match self.space {
            FieldSpace::R3points => {
                if self.positions.is_none() {
                    return Err(Error::Parse("R3points file needs a positions array".into()));
                }
                if self.field_orders.iter().any(|&l| l < 0) {
                    return Err(Error::Parse("point-set degrees must be nonnegative".into()));
                }
            }
            FieldSpace::S2 => {
                if self.field_orders.is_empty() {
                    return Err(Error::Parse("S2 file needs at least one field order".into()));
                }
            }
            FieldSpace::SO3 => {
                if !self.field_orders.is_empty() {
                    return Err(Error::Parse("SO3 file takes no field orders".into()));
                }
            }
        }
        let (nodes, dims) = (self.nodes()?, self.dims());
        if self.data.len() != self.channels {
            return Err(Error::Parse(format!("expected {} channels, found {}", self.channels, self.data.len())));
        }
        for (c, ch) in self.data.iter().enumerate() {
            if ch.len() != nodes {
                return Err(Error::Parse(format!("channel {c}: expected {nodes} nodes, found {}", ch.len())));
            }
            if let Some(n) = ch.iter().position(|v| v.len() != dims) {
                return Err(Error::Parse(format!("channel {c}, node {n}: expected {dims} components")));
            }
        }
        Ok(())
    }

    pub fn to_fields(&self) -> Result<Vec<TensorField>> {
        self.validate()?;
        if self.space != FieldSpace::S2 {
            return Err(Error::Parse(format!("expected an S2 file, found {}", self.space.name())));
        }
        let grid = grid_for(self.space, self.bandwidth)?;
        self.field_orders
            .iter()
            .enumerate()
            .map(|(d, &k)| {
                let samples = self.data.iter().map(|ch| ch.iter().map(|v| C::new(v[d][0], v[d][1])).collect()).collect();
                TensorField::new(grid.clone(), FieldType::so2(k), samples)
            })
            .collect()
    }

    pub fn to_group_function(&self) -> Result<GroupFunction> {
        self.validate()?;
        if self.space != FieldSpace::SO3 {
            return Err(Error::Parse(format!("expected an SO3 file, found {}", self.space.name())));
        }
        let samples = self.data.iter().map(|ch| ch.iter().map(|v| C::new(v[0][0], v[0][1])).collect()).collect();
        GroupFunction::new(grid_for(self.space, self.bandwidth)?, samples)
    }

    pub fn to_cloud(&self) -> Result<PointCloud> {
        self.validate()?;
        let Some(pos) = self.positions.as_ref().filter(|_| self.space == FieldSpace::R3points) else {
            return Err(Error::Parse(format!("expected an R3points file, found {}", self.space.name())));
        };
        let features = (0..pos.len())
            .map(|p| {
                let mut off = 0;
                self.field_orders
                    .iter()
                    .map(|&l| {
                        let n = 2 * l as usize + 1;
                        let b = DMatrix::from_fn(n, self.channels, |i, c| self.data[c][p][off + i][0]);
                        off += n;
                        (l as usize, b)
                    })
                    .collect::<SphereFeatures>()
            })
            .collect();
        PointCloud::new(pos.iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect(), features)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(s)?;
        f.validate()?;
        Ok(f)
    }

    fn coord_names(&self) -> [&'static str; 3] {
        match self.space {
            FieldSpace::R3points => ["x", "y", "z"],
            _ => ["alpha", "beta", "gamma"],
        }
    }

    /// CSV with a metadata comment line, a header, and one row per
    /// `(channel, node, dim)` in row-major order.
    pub fn to_csv(&self) -> Result<String> {
        self.validate()?;
        let orders: Vec<String> = self.field_orders.iter().map(|k| k.to_string()).collect();
        let mut out = format!(
            "# format_version={} space={} bandwidth={} field_orders={} channels={}\n",
            self.format_version,
            self.space.name(),
            self.bandwidth,
            orders.join(";"),
            self.channels
        );
        let coords: Vec<[f64; 3]> = match (&self.positions, self.space) {
            (Some(p), FieldSpace::R3points) => p.clone(),
            (_, s) => grid_for(s, self.bandwidth)?.nodes().iter().map(|n| [n.alpha, n.beta, n.gamma]).collect(),
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        let [a, b, c] = self.coord_names();
        w.write_record(["channel", "node", "dim", a, b, c, "re", "im"])?;
        for (ci, ch) in self.data.iter().enumerate() {
            for (ni, v) in ch.iter().enumerate() {
                for (d, z) in v.iter().enumerate() {
                    let x = coords[ni];
                    w.write_record([
                        ci.to_string(),
                        ni.to_string(),
                        d.to_string(),
                        x[0].to_string(),
                        x[1].to_string(),
                        x[2].to_string(),
                        z[0].to_string(),
                        z[1].to_string(),
                    ])?;
                }
            }
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (meta, body) = text.split_once('\n').unwrap_or((text, ""));
        let meta = meta
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("line 1: expected '# format_version=...' metadata".into()))?;
        let mut version = None;
        let mut space = None;
        let mut bandwidth = None;
        let mut orders = None;
        let mut channels = None;
        for kv in meta.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line 1: malformed metadata entry {kv:?}")))?;
            let bad = |what: &str| Error::Parse(format!("line 1: bad {what} {v:?}"));
            match k {
                "format_version" => version = Some(v.parse::<u32>().map_err(|_| bad(k))?),
                "space" => space = Some(FieldSpace::parse(v).ok_or_else(|| bad(k))?),
                "bandwidth" => bandwidth = Some(v.parse::<usize>().map_err(|_| bad(k))?),
                "field_orders" => {
                    orders = Some(if v.is_empty() {
                        Vec::new()
                    } else {
                        v.split(';').map(|s| s.parse::<i64>()).collect::<std::result::Result<Vec<_>, _>>().map_err(|_| bad(k))?
                    })
                }
                "channels" => channels = Some(v.parse::<usize>().map_err(|_| bad(k))?),
                _ => return Err(Error::Parse(format!("line 1: unknown metadata key {k:?}"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("line 1: missing {k}"));
        let version = version.ok_or_else(|| missing("format_version"))?;
        if version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format_version {version} (this build reads version {FORMAT_VERSION})"
            )));
        }
        let mut file = Self {
            format_version: version,
            space: space.ok_or_else(|| missing("space"))?,
            bandwidth: bandwidth.ok_or_else(|| missing("bandwidth"))?,
            field_orders: orders.ok_or_else(|| missing("field_orders"))?,
            channels: channels.ok_or_else(|| missing("channels"))?,
            data: Vec::new(),
            positions: None,
        };
        let dims = file.dims();
        let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(body.as_bytes());
        let header = rdr.headers()?.clone();
        let [a, b, c] = file.coord_names();
        let want = ["channel", "node", "dim", a, b, c, "re", "im"];
        if header.iter().ne(want) {
            return Err(Error::Parse(format!("line 2: expected header {}", want.join(","))));
        }
        let mut data: Vec<Vec<Vec<[f64; 2]>>> = vec![Vec::new(); file.channels];
        let mut positions = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            // Line numbers count the metadata line.
            let line = rec.position().map_or(0, |p| p.line() + 1);
            if rec.len() != want.len() {
                return Err(Error::Parse(format!("line {line}: expected {} fields, found {}", want.len(), rec.len())));
            }
            let field = |i: usize| -> Result<&str> {
                rec.get(i).ok_or_else(|| Error::Parse(format!("line {line}: missing field {}", want[i])))
            };
            let int = |i: usize| -> Result<usize> {
                field(i)?.parse().map_err(|_| Error::Parse(format!("line {line}, field {}: not an index", want[i])))
            };
            let num = |i: usize| -> Result<f64> {
                field(i)?.parse().map_err(|_| Error::Parse(format!("line {line}, field {}: not a number", want[i])))
            };
            let (ch, node, dim) = (int(0)?, int(1)?, int(2)?);
            let slot = data
                .get_mut(ch)
                .ok_or_else(|| Error::Parse(format!("line {line}, field channel: {ch} out of range")))?;
            if node == slot.len() && dim == 0 {
                slot.push(Vec::with_capacity(dims));
                if ch == 0 && file.space == FieldSpace::R3points {
                    positions.push([num(3)?, num(4)?, num(5)?]);
                }
            }
            let ok = node + 1 == slot.len() && dim == slot[node].len() && dim < dims;
            if !ok {
                return Err(Error::Parse(format!("line {line}: row (channel {ch}, node {node}, dim {dim}) out of order")));
            }
            slot[node].push([num(6)?, num(7)?]);
        }
        file.data = data;
        if file.space == FieldSpace::R3points {
            file.positions = Some(positions);
        }
        file.validate()?;
        Ok(file)
    }

    /// Reads JSON or CSV depending on the extension (`.csv` is CSV, anything else JSON).
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        if is_csv(path) {
            Self::from_csv(&text)
        } else {
            Self::from_json(&text)
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = if is_csv(path) { self.to_csv()? } else { self.to_json()? };
        fs::write(path, text)?;
        Ok(())
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Converts between the JSON and CSV forms, chosen by file extension.
pub fn convert_field(input: &Path, output: &Path) -> Result<()> {
    FieldFile::read(input)?.write(output)
}
