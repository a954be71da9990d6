//! Groups acting on the homogeneous spaces S², ℝ² and ℝ³.

mod grid;
mod rigid;
mod rotation;

pub use grid::{GridDescriptor, GridNode, QuadratureGrid, Space};
pub use rigid::{SE2Element, SE3Element};
pub use rotation::{sphere_projection, sphere_section, sphere_twist, wrap_angle, Rotation3, SpherePoint};

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of one of the supported groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GroupElement {
    So3(Rotation3),
    Se2(SE2Element),
    Se3(SE3Element),
}

/// A point of `G/H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HomPoint {
    Sphere(SpherePoint),
    Plane(Vector2<f64>),
    Space(Vector3<f64>),
}

/// A stabilizer element: SO(2) angles for S² and ℝ², SO(3) for ℝ³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stabilizer {
    Angle(f64),
    Rotation(Rotation3),
}

impl GroupElement {
    pub fn kind(&self) -> &'static str {
        match self {
            GroupElement::So3(_) => "SO(3)",
            GroupElement::Se2(_) => "SE(2)",
            GroupElement::Se3(_) => "SE(3)",
        }
    }

    pub fn identity_like(&self) -> Self {
        match self {
            GroupElement::So3(_) => GroupElement::So3(Rotation3::identity()),
            GroupElement::Se2(_) => GroupElement::Se2(SE2Element::identity()),
            GroupElement::Se3(_) => GroupElement::Se3(SE3Element::identity()),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            GroupElement::So3(r) => GroupElement::So3(r.inverse()),
            GroupElement::Se2(g) => GroupElement::Se2(g.inverse()),
            GroupElement::Se3(g) => GroupElement::Se3(g.inverse()),
        }
    }

    pub fn act(&self, x: &HomPoint) -> Result<HomPoint> {
        match (self, x) {
            (GroupElement::So3(r), HomPoint::Sphere(p)) => Ok(HomPoint::Sphere(r.act(*p))),
            (GroupElement::Se2(g), HomPoint::Plane(p)) => Ok(HomPoint::Plane(g.act(p))),
            (GroupElement::Se3(g), HomPoint::Space(p)) => Ok(HomPoint::Space(g.act(p))),
            _ => Err(Error::GroupMismatch(self.kind(), x.space_name())),
        }
    }
}

impl HomPoint {
    fn space_name(&self) -> &'static str {
        match self {
            HomPoint::Sphere(_) => "S²",
            HomPoint::Plane(_) => "ℝ²",
            HomPoint::Space(_) => "ℝ³",
        }
    }
}

/// Group law, with an error for elements of different groups.
pub fn compose(g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
    match (g1, g2) {
        (GroupElement::So3(a), GroupElement::So3(b)) => Ok(GroupElement::So3(a.compose(b))),
        (GroupElement::Se2(a), GroupElement::Se2(b)) => Ok(GroupElement::Se2(a.compose(b))),
        (GroupElement::Se3(a), GroupElement::Se3(b)) => Ok(GroupElement::Se3(a.compose(b))),
        _ => Err(Error::GroupMismatch(g1.kind(), g2.kind())),
    }
}

/// Section `s: G/H → G` with `p(s(x)) = x`.
pub fn section(x: &HomPoint) -> GroupElement {
    match x {
        HomPoint::Sphere(p) => GroupElement::So3(sphere_section(*p)),
        HomPoint::Plane(p) => GroupElement::Se2(SE2Element::section(p)),
        HomPoint::Space(p) => GroupElement::Se3(SE3Element::section(p)),
    }
}

/// Twist `h(g, x)` defined by `g·s(x) = s(g·x)·h(g, x)`.
pub fn twist(g: &GroupElement, x: &HomPoint) -> Result<Stabilizer> {
    match (g, x) {
        (GroupElement::So3(r), HomPoint::Sphere(p)) => Ok(Stabilizer::Angle(sphere_twist(r, *p))),
        (GroupElement::Se2(e), HomPoint::Plane(p)) => Ok(Stabilizer::Angle(e.twist(p))),
        (GroupElement::Se3(e), HomPoint::Space(p)) => Ok(Stabilizer::Rotation(e.twist(p))),
        _ => Err(Error::GroupMismatch(g.kind(), x.space_name())),
    }
}
