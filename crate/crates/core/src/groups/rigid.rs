//! Rigid motions of the plane and of space.

use nalgebra::{Matrix3, Matrix4, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::rotation::{wrap_angle, Rotation3};

/// An element of SE(2): translation by the polar vector `(a, phi)` then rotation by `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SE2Element {
    pub a: f64,
    pub phi: f64,
    pub theta: f64,
}

impl SE2Element {
    pub fn identity() -> Self {
        Self {
            a: 0.0,
            phi: 0.0,
            theta: 0.0,
        }
    }

    pub fn new(a: f64, phi: f64, theta: f64) -> Self {
        assert!(a >= 0.0, "radius must be nonnegative");
        Self::from_parts(Vector2::new(a * phi.cos(), a * phi.sin()), theta)
    }

    pub fn from_parts(t: Vector2<f64>, theta: f64) -> Self {
        let a = t.norm();
        let phi = if a == 0.0 { 0.0 } else { wrap_angle(t.y.atan2(t.x)) };
        Self {
            a,
            phi,
            theta: wrap_angle(theta),
        }
    }

    pub fn translation(&self) -> Vector2<f64> {
        Vector2::new(self.a * self.phi.cos(), self.a * self.phi.sin())
    }

    pub fn rotate(theta: f64, v: &Vector2<f64>) -> Vector2<f64> {
        let (s, c) = theta.sin_cos();
        Vector2::new(c * v.x - s * v.y, s * v.x + c * v.y)
    }

    pub fn compose(&self, other: &Self) -> Self {
        let t = self.translation() + Self::rotate(self.theta, &other.translation());
        Self::from_parts(t, self.theta + other.theta)
    }

    pub fn inverse(&self) -> Self {
        let t = -Self::rotate(-self.theta, &self.translation());
        Self::from_parts(t, -self.theta)
    }

    pub fn act(&self, x: &Vector2<f64>) -> Vector2<f64> {
        self.translation() + Self::rotate(self.theta, x)
    }

    /// Homogeneous 3×3 matrix.
    pub fn matrix(&self) -> Matrix3<f64> {
        let (s, c) = self.theta.sin_cos();
        let t = self.translation();
        Matrix3::new(c, -s, t.x, s, c, t.y, 0.0, 0.0, 1.0)
    }

    /// Section of SE(2) → ℝ²: pure translation.
    pub fn section(x: &Vector2<f64>) -> Self {
        Self::from_parts(*x, 0.0)
    }

    /// Twist of the semidirect product: the rotation part, independent of `x`.
    pub fn twist(&self, _x: &Vector2<f64>) -> f64 {
        self.theta
    }
}

/// An element of SE(3): `v ↦ r·v + x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SE3Element {
    pub x: Vector3<f64>,
    pub r: Rotation3,
}

impl SE3Element {
    pub fn identity() -> Self {
        Self {
            x: Vector3::zeros(),
            r: Rotation3::identity(),
        }
    }

    pub fn new(x: Vector3<f64>, r: Rotation3) -> Self {
        Self { x, r }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            x: self.x + self.r.apply(&other.x),
            r: self.r.compose(&other.r),
        }
    }

    pub fn inverse(&self) -> Self {
        let ri = self.r.inverse();
        Self {
            x: -ri.apply(&self.x),
            r: ri,
        }
    }

    pub fn act(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.r.apply(v) + self.x
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.r.matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.x);
        m
    }

    pub fn section(x: &Vector3<f64>) -> Self {
        Self {
            x: *x,
            r: Rotation3::identity(),
        }
    }

    pub fn twist(&self, _x: &Vector3<f64>) -> Rotation3 {
        self.r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    #[test]
    fn se2_matches_matrix_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let g = SE2Element::new(rng.random_range(0.0..3.0), rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
            let h = SE2Element::new(rng.random_range(0.0..3.0), rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
            assert!((g.compose(&h).matrix() - g.matrix() * h.matrix()).abs().max() < 1e-12);
            assert!((g.compose(&g.inverse()).matrix() - Matrix3::identity()).abs().max() < 1e-12);
        }
        assert_eq!(SE2Element::identity(), SE2Element::new(0.0, 0.0, 0.0));
    }

    #[test]
    fn se2_twist_is_rotation_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let g = SE2Element::new(rng.random_range(0.0..2.0), rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
            let x = Vector2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            // g·s(x) = s(g·x)·h
            let lhs = g.compose(&SE2Element::section(&x)).matrix();
            let h = SE2Element::from_parts(Vector2::zeros(), g.twist(&x));
            let rhs = SE2Element::section(&g.act(&x)).compose(&h).matrix();
            assert!((lhs - rhs).abs().max() < 1e-12);
            assert_eq!(g.twist(&x), g.theta);
        }
    }

    #[test]
    fn se3_matches_matrix_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rand_g = |rng: &mut ChaCha8Rng| {
            SE3Element::new(
                Vector3::new(rng.random(), rng.random(), rng.random()),
                Rotation3::from_euler(rng.random_range(0.0..TAU), rng.random_range(0.0..3.1), rng.random_range(0.0..TAU)),
            )
        };
        for _ in 0..100 {
            let g = rand_g(&mut rng);
            let h = rand_g(&mut rng);
            assert!((g.compose(&h).matrix() - g.matrix() * h.matrix()).abs().max() < 1e-12);
            assert!((g.compose(&g.inverse()).matrix() - Matrix4::identity()).abs().max() < 1e-12);
            let x = Vector3::new(rng.random(), rng.random(), rng.random());
            let lhs = g.compose(&SE3Element::section(&x)).matrix();
            let rhs = SE3Element::section(&g.act(&x))
                .compose(&SE3Element::new(Vector3::zeros(), g.twist(&x)))
                .matrix();
            assert!((lhs - rhs).abs().max() < 1e-12);
        }
    }
}
