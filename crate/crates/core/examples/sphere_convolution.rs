//! Convolution between field orders with a sparse kernel: one coefficient per
//! degree and channel pair. Checked against the spatial twisted correlation.

use homharm::conv::{conv_field, conv_spatial_oracle, SparseKernelSpec};
use homharm::fields::{induced_action, TensorField};
use homharm::groups::{GroupElement, QuadratureGrid, Space};
use homharm::random;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let n: f64 = a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let d: f64 = b.iter().flatten().map(|y| y.norm_sqr()).sum();
    (n / d).sqrt()
}

fn main() -> homharm::Result<()> {
    let b = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid = QuadratureGrid::new(Space::S2, b)?;
    let f = TensorField::from_spectrum(&random::column(&mut rng, b, 0, 2), &grid)?;

    // Scalar input (order 0), order-1 output, low-pass coefficients.
    let k = SparseKernelSpec::from_fn(0, 1, b, 1, 2, |_, i, l| Complex64::new(1.0 / (1 + l + i) as f64, 0.0))?;
    println!("kernel has {} free coefficients per channel pair", k.dimension());
    println!("{}", k.to_json()?);

    let out = conv_field(&f, &k)?;
    let oracle = conv_spatial_oracle(&f, &k)?;
    println!("spectral vs spatial: relative difference {:.2e}", rel(&out.samples, &oracle.samples));

    let g = GroupElement::So3(random::rotation(&mut rng));
    let a = conv_field(&induced_action(&g, &f)?, &k)?;
    let c = induced_action(&g, &out)?;
    println!("equivariance error {:.2e}", rel(&a.samples, &c.samples));
    Ok(())
}
