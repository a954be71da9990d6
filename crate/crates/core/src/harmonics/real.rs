//! Change of basis between complex and real spherical harmonics.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::wigner::WignerBlock;

/// Unitary `Q` taking complex coefficients `a` (w.r.t. `Y^l_m`) to real coefficients
/// `b = Q a` (w.r.t. the real harmonics). Rotations become `Q D^l Q^†`, which is real.
///
/// Real harmonics, for `m > 0`: `(Y_{-m} + (-1)^m Y_m)/√2`; for `m < 0`:
/// `i (Y_m - (-1)^m Y_{-m})/√2`; `m = 0` unchanged.
pub fn real_basis_change(l: usize) -> DMatrix<Complex64> {
    let n = 2 * l + 1;
    let li = l as i64;
    let idx = |m: i64| (m + li) as usize;
    let h = FRAC_1_SQRT_2;
    let mut u = DMatrix::<Complex64>::zeros(n, n);
    u[(idx(0), idx(0))] = Complex64::new(1.0, 0.0);
    for m in 1..=li {
        let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
        u[(idx(m), idx(-m))] = Complex64::new(h, 0.0);
        u[(idx(m), idx(m))] = Complex64::new(sgn * h, 0.0);
        u[(idx(-m), idx(-m))] = Complex64::new(0.0, h);
        u[(idx(-m), idx(m))] = Complex64::new(0.0, -sgn * h);
    }
    u.map(|z| z.conj())
}

/// Real orthogonal form of a Wigner block.
pub fn real_wigner(block: &WignerBlock) -> DMatrix<f64> {
    let q = real_basis_change(block.l);
    (&q * &block.entries * q.adjoint()).map(|z| z.re)
}

/// Complex coefficients to real ones.
pub fn to_real_coeffs(l: usize, a: &DVector<Complex64>) -> DVector<f64> {
    (real_basis_change(l) * a).map(|z| z.re)
}

/// Real coefficients to complex ones.
pub fn to_complex_coeffs(l: usize, b: &DVector<f64>) -> DVector<Complex64> {
    real_basis_change(l).adjoint() * b.map(|x| Complex64::new(x, 0.0))
}

/// Real spherical harmonics of degree `l` at a point: `conj(Q)·Y`, indexed `m + l`.
pub fn real_sph_harm(l: usize, y: &[Complex64]) -> Vec<f64> {
    let q = real_basis_change(l);
    (0..2 * l + 1)
        .map(|r| (0..2 * l + 1).map(|c| q[(r, c)].conj() * y[c]).sum::<Complex64>().re)
        .collect()
}
