//! Spherical harmonics, orthonormal under the normalized sphere measure.
//!
//! `Y^l_m(α, β) = sqrt(2l+1) · conj(D^l_{m0}(α, β, 0))`, Condon–Shortley phase,
//! `Y^0_0 = 1`.

use num_complex::Complex64;

use crate::groups::SpherePoint;

/// Normalized associated Legendre values `P̃^m_l(cos β)` for `0 ≤ m ≤ l ≤ lmax`,
/// indexed `[l][m]`, including the Condon–Shortley sign.
pub fn legendre_table(lmax: usize, beta: f64) -> Vec<Vec<f64>> {
    let (s, x) = beta.sin_cos();
    let mut p: Vec<Vec<f64>> = (0..=lmax).map(|l| vec![0.0; l + 1]).collect();
    p[0][0] = 1.0;
    for m in 1..=lmax {
        let mf = m as f64;
        p[m][m] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[m - 1][m - 1];
    }
    for m in 0..lmax {
        p[m + 1][m] = (2.0 * m as f64 + 3.0).sqrt() * x * p[m][m];
    }
    for m in 0..=lmax {
        let mf = m as f64;
        for l in m + 2..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let l1 = lf - 1.0;
            let b = ((l1 * l1 - mf * mf) / (4.0 * l1 * l1 - 1.0)).sqrt();
            p[l][m] = a * (x * p[l - 1][m] - b * p[l - 2][m]);
        }
    }
    p
}

/// All `Y^l_m(x)` for `l ≤ lmax`, indexed `[l][m + l]`.
pub fn sph_harm_all(lmax: usize, x: SpherePoint) -> Vec<Vec<Complex64>> {
    let p = legendre_table(lmax, x.beta);
    (0..=lmax)
        .map(|l| {
            let li = l as i64;
            (-li..=li)
                .map(|m| {
                    let ma = m.unsigned_abs() as usize;
                    let pos = Complex64::from_polar(p[l][ma], ma as f64 * x.alpha);
                    if m >= 0 {
                        pos
                    } else if ma % 2 == 0 {
                        pos.conj()
                    } else {
                        -pos.conj()
                    }
                })
                .collect()
        })
        .collect()
}

/// A single `Y^l_m(x)`.
pub fn sph_harm(l: usize, m: i64, x: SpherePoint) -> Complex64 {
    assert!(m.unsigned_abs() as usize <= l, "|m| must not exceed l");
    sph_harm_all(l, x)[l][(m + l as i64) as usize]
}
