//! Forward and inverse transforms on S² and SO(3), and the energy identity.

use homharm::groups::{QuadratureGrid, Space};
use homharm::random;
use homharm::transforms::{sht_forward, sht_inverse, so3_ft_forward, so3_ft_inverse};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> homharm::Result<()> {
    let b = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    // A bandlimited function on the sphere from random coefficients.
    let coeffs = random::real_sht_coeffs(&mut rng, b, 1);
    let samples = sht_inverse(&coeffs)?;
    let grid = QuadratureGrid::new(Space::S2, b)?;
    println!("S² grid: {} nodes, f is real: {}", grid.len(), samples[0].iter().all(|z| z.im.abs() < 1e-12));

    let back = sht_forward(&grid, &samples, b)?;
    let err = back.coeffs[0].iter().flatten().zip(coeffs.coeffs[0].iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    println!("SHT round trip, max coefficient error {err:.2e}");

    // Per-degree power spectrum.
    for l in 0..b {
        let p: f64 = back.coeffs[0][l].iter().map(Complex64::norm_sqr).sum();
        println!("  l = {l}: power {p:.4}");
    }

    let so3 = QuadratureGrid::new(Space::SO3, b)?;
    let spec = random::blocks(&mut rng, b, 2);
    let f = so3_ft_inverse(&spec)?;
    let energy: f64 = f[0].iter().zip(so3.weights()).map(|(z, w)| w * z.norm_sqr()).sum::<f64>()
        + f[1].iter().zip(so3.weights()).map(|(z, w)| w * z.norm_sqr()).sum::<f64>();
    let back = so3_ft_forward(&so3, &f)?;
    println!("SO(3): {} nodes, ∫|f|² = {energy:.6}, Σ(2l+1)|f̂|² = {:.6}", so3.len(), back.weighted_energy());
    Ok(())
}
