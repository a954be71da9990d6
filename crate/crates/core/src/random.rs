//! Random test inputs: rotations and bandlimited spectra.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::groups::Rotation3;
use crate::transforms::{ColumnSpectrum, ShtCoeffs, SpectralBlocks};

/// Haar-distributed rotation.
pub fn rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation3 {
    Rotation3::from_euler(
        rng.random_range(0.0..TAU),
        rng.random::<f64>().mul_add(2.0, -1.0).clamp(-1.0, 1.0).acos(),
        rng.random_range(0.0..TAU),
    )
}

/// Complex number with independent uniform parts in `[-1, 1)`.
pub fn complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn sht_coeffs<R: Rng + ?Sized>(rng: &mut R, bandwidth: usize, channels: usize) -> ShtCoeffs {
    let mut c = ShtCoeffs::zeros(bandwidth, channels);
    for ch in &mut c.coeffs {
        for row in ch.iter_mut() {
            for v in row.iter_mut() {
                *v = complex(rng);
            }
        }
    }
    c
}

/// Coefficients of a real-valued function: `f^l_{-m} = (-1)^m conj(f^l_m)`.
pub fn real_sht_coeffs<R: Rng + ?Sized>(rng: &mut R, bandwidth: usize, channels: usize) -> ShtCoeffs {
    let mut c = ShtCoeffs::zeros(bandwidth, channels);
    for ch in 0..channels {
        for l in 0..bandwidth {
            c.set(ch, l, 0, Complex64::new(rng.random_range(-1.0..1.0), 0.0));
            for m in 1..=l as i64 {
                let v = complex(rng);
                c.set(ch, l, m, v);
                c.set(ch, l, -m, if m % 2 == 0 { v.conj() } else { -v.conj() });
            }
        }
    }
    c
}

pub fn blocks<R: Rng + ?Sized>(rng: &mut R, bandwidth: usize, channels: usize) -> SpectralBlocks {
    let mut b = SpectralBlocks::zeros(bandwidth, channels);
    for ch in &mut b.blocks {
        for blk in ch.iter_mut() {
            for v in blk.iter_mut() {
                *v = complex(rng);
            }
        }
    }
    b
}

pub fn column<R: Rng + ?Sized>(rng: &mut R, bandwidth: usize, order: i64, channels: usize) -> ColumnSpectrum {
    let mut c = ColumnSpectrum::zeros(bandwidth, order, channels);
    let lmin = order.unsigned_abs() as usize;
    for ch in &mut c.coeffs {
        for row in ch.iter_mut().skip(lmin) {
            for v in row.iter_mut() {
                *v = complex(rng);
            }
        }
    }
    c
}
