//! Rotations in Z-Y-Z Euler form and the sphere as the coset space SO(3)/SO(2).

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Below this value of `sin(beta)` the Euler decomposition is treated as degenerate.
const GIMBAL_EPS: f64 = 1e-14;

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// A rotation `Rz(alpha) Ry(beta) Rz(gamma)`.
///
/// Angles are kept canonical: `alpha, gamma ∈ [0, 2π)`, `beta ∈ [0, π]`. When
/// `beta` sits at a pole the decomposition is not unique; there `gamma` is
/// stored as zero and the combined angle is folded into `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation3 {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for Rotation3 {
    fn default() -> Self {
        Self::identity()
    }
}

impl Rotation3 {
    pub fn identity() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
        }
    }

    /// Builds a rotation from raw Euler angles and canonicalizes them.
    pub fn from_euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self::from_matrix(&euler_matrix(alpha, beta, gamma))
    }

    /// Rotation about the z axis.
    pub fn rz(angle: f64) -> Self {
        Self {
            alpha: wrap_angle(angle),
            beta: 0.0,
            gamma: 0.0,
        }
    }

    /// Rotation about the y axis by an angle in `[0, π]`.
    pub fn ry(angle: f64) -> Self {
        Self::from_euler(0.0, angle, 0.0)
    }

    /// The 3×3 rotation matrix `Rz(α) Ry(β) Rz(γ)`.
    pub fn matrix(&self) -> Matrix3<f64> {
        euler_matrix(self.alpha, self.beta, self.gamma)
    }

    /// Recovers canonical Euler angles from an orthogonal matrix with determinant +1.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let s = m[(0, 2)].hypot(m[(1, 2)]);
        let beta = s.atan2(m[(2, 2)]);
        if s <= GIMBAL_EPS {
            // Pole: only alpha ± gamma is observable.
            let alpha = if m[(2, 2)] > 0.0 {
                m[(1, 0)].atan2(m[(1, 1)])
            } else {
                (-m[(1, 0)]).atan2(m[(1, 1)])
            };
            return Self {
                alpha: wrap_angle(alpha),
                beta,
                gamma: 0.0,
            };
        }
        let alpha = m[(1, 2)].atan2(m[(0, 2)]);
        let gamma = m[(2, 1)].atan2(-m[(2, 0)]);
        Self {
            alpha: wrap_angle(alpha),
            beta,
            gamma: wrap_angle(gamma),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::from_matrix(&(self.matrix() * other.matrix()))
    }

    pub fn inverse(&self) -> Self {
        Self::from_matrix(&self.matrix().transpose())
    }

    /// Applies the rotation to a vector.
    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.matrix() * v
    }

    /// Rotates a point on the sphere.
    pub fn act(&self, x: SpherePoint) -> SpherePoint {
        SpherePoint::from_vector(&self.apply(&x.to_vector()))
    }
}

fn euler_matrix(alpha: f64, beta: f64, gamma: f64) -> Matrix3<f64> {
    rz_matrix(alpha) * ry_matrix(beta) * rz_matrix(gamma)
}

pub(crate) fn rz_matrix(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

pub(crate) fn ry_matrix(b: f64) -> Matrix3<f64> {
    let (s, c) = b.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// A point on the unit sphere in (azimuth `alpha`, colatitude `beta`) coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub alpha: f64,
    pub beta: f64,
}

impl SpherePoint {
    pub const NORTH: SpherePoint = SpherePoint {
        alpha: 0.0,
        beta: 0.0,
    };

    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn to_vector(&self) -> Vector3<f64> {
        let (sb, cb) = self.beta.sin_cos();
        let (sa, ca) = self.alpha.sin_cos();
        Vector3::new(sb * ca, sb * sa, cb)
    }

    /// Direction of a nonzero vector. The azimuth is set to zero at the poles.
    pub fn from_vector(v: &Vector3<f64>) -> Self {
        let rho = v.x.hypot(v.y);
        let beta = rho.atan2(v.z);
        let alpha = if rho == 0.0 { 0.0 } else { wrap_angle(v.y.atan2(v.x)) };
        Self { alpha, beta }
    }

    /// Geodesic distance to another point, used for comparisons away from the poles.
    pub fn angle_to(&self, other: &SpherePoint) -> f64 {
        let a = self.to_vector();
        let b = other.to_vector();
        a.cross(&b).norm().atan2(a.dot(&b))
    }
}

/// Section of SO(3) → S²: the rotation `(α, β, 0)` that carries the north pole to `x`.
pub fn sphere_section(x: SpherePoint) -> Rotation3 {
    Rotation3::from_euler(x.alpha, x.beta, 0.0)
}

/// Coset projection `g ↦ g·north`.
pub fn sphere_projection(g: &Rotation3) -> SpherePoint {
    if g.beta == 0.0 {
        SpherePoint::NORTH
    } else {
        SpherePoint::new(g.alpha, g.beta)
    }
}

/// Twist angle `θ` with `g·s(x) = s(g·x)·Rz(θ)`.
pub fn sphere_twist(g: &Rotation3, x: SpherePoint) -> f64 {
    let moved = g.compose(&sphere_section(x));
    let section = sphere_section(sphere_projection(&moved));
    let h = section.inverse().compose(&moved);
    // h fixes the north pole, so it is a pure z rotation.
    h.matrix()[(1, 0)].atan2(h.matrix()[(0, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rotation(rng: &mut impl Rng) -> Rotation3 {
        Rotation3::from_euler(
            rng.random_range(0.0..TAU),
            rng.random::<f64>().mul_add(2.0, -1.0).acos(),
            rng.random_range(0.0..TAU),
        )
    }

    fn matrix_from_axis_angle(axis: Vector3<f64>, angle: f64) -> Matrix3<f64> {
        // Rodrigues formula, independent of the Euler path.
        let k = axis.normalize();
        let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
        Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos())
    }

    #[test]
    fn identity_composition() {
        let g = Rotation3::from_euler(0.3, 1.1, 2.0);
        let h = Rotation3::identity().compose(&g);
        assert!((h.alpha - g.alpha).abs() < 1e-12);
        assert!((h.beta - g.beta).abs() < 1e-12);
        assert!((h.gamma - g.gamma).abs() < 1e-12);
    }

    #[test]
    fn z_rotations_add() {
        let a = Rotation3::rz(4.0).compose(&Rotation3::rz(3.5));
        assert!((a.alpha - (7.5 % TAU)).abs() < 1e-12);
        assert_eq!(a.beta, 0.0);
        assert_eq!(a.gamma, 0.0);
    }

    #[test]
    fn composition_matches_rodrigues_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let ax1 = Vector3::new(rng.random(), rng.random(), rng.random::<f64>() + 0.1);
            let ax2 = Vector3::new(rng.random(), rng.random::<f64>() - 0.5, rng.random());
            let m1 = matrix_from_axis_angle(ax1, rng.random_range(0.0..3.0));
            let m2 = matrix_from_axis_angle(ax2, rng.random_range(0.0..3.0));
            let g = Rotation3::from_matrix(&m1).compose(&Rotation3::from_matrix(&m2));
            assert!((g.matrix() - m1 * m2).abs().max() < 1e-12);
            assert!((g.matrix().determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn associativity_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let (a, b, c) = (
                random_rotation(&mut rng),
                random_rotation(&mut rng),
                random_rotation(&mut rng),
            );
            let left = a.compose(&b).compose(&c).matrix();
            let right = a.compose(&b.compose(&c)).matrix();
            assert!((left - right).abs().max() < 1e-12);
            let e = a.compose(&a.inverse()).matrix();
            assert!((e - Matrix3::identity()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn gimbal_canonicalization() {
        let g = Rotation3::from_euler(0.4, 0.0, 0.9);
        assert_eq!(g.gamma, 0.0);
        assert!((g.alpha - 1.3).abs() < 1e-14);
        let g = Rotation3::from_euler(0.4, PI, 0.9);
        assert_eq!(g.gamma, 0.0);
        assert!((g.alpha - wrap_angle(0.4 - 0.9)).abs() < 1e-14);
        assert!((g.matrix() - euler_matrix(0.4, PI, 0.9)).abs().max() < 1e-14);
    }

    #[test]
    fn section_of_north_is_identity() {
        let s = sphere_section(SpherePoint::NORTH);
        assert!((s.matrix() - Matrix3::identity()).abs().max() < 1e-15);
    }

    #[test]
    fn section_projects_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = SpherePoint::new(rng.random_range(0.0..TAU), rng.random_range(0.01..PI - 0.01));
            let s = sphere_section(x);
            assert_eq!(s.gamma, 0.0);
            let y = sphere_projection(&s);
            assert!(x.angle_to(&y) < 1e-12);
            assert!((s.apply(&Vector3::z()) - x.to_vector()).norm() < 1e-12);
        }
    }

    #[test]
    fn twist_defining_relation_and_cocycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let g1 = random_rotation(&mut rng);
            let g2 = random_rotation(&mut rng);
            let x = SpherePoint::new(rng.random_range(0.0..TAU), rng.random_range(0.05..PI - 0.05));
            let theta = sphere_twist(&g1, x);
            let lhs = g1.compose(&sphere_section(x)).matrix();
            let rhs = sphere_section(g1.act(x)).matrix() * rz_matrix(theta);
            assert!((lhs - rhs).abs().max() < 1e-12);

            let t12 = sphere_twist(&g1.compose(&g2), x);
            let t = sphere_twist(&g1, g2.act(x)) + sphere_twist(&g2, x);
            let d = wrap_angle(t12 - t);
            assert!(d.min(TAU - d) < 1e-11, "cocycle residual {d}");
        }
        assert!(sphere_twist(&Rotation3::identity(), SpherePoint::new(1.0, 0.7)).abs() < 1e-14);
    }
}
