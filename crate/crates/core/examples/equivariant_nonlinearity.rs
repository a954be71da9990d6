//! Lift, activate pointwise on SO(3), project back. Equivariance is exact for
//! grid-aligned rotations and improves with oversampling for generic ones.

use std::f64::consts::PI;

use homharm::fields::{induced_action, TensorField};
use homharm::groups::{GroupElement, QuadratureGrid, Rotation3, Space};
use homharm::nonlin::{nonlinearity, ActivationKind, ActivationSpec, NonlinOptions};
use homharm::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn error(fs: &[TensorField], g: &GroupElement, spec: &ActivationSpec, os: usize) -> homharm::Result<f64> {
    let opts = NonlinOptions { oversample: os };
    let orders = [-1, 0, 1];
    let base = nonlinearity(fs, spec, &orders, opts)?;
    let moved = fs.iter().map(|f| induced_action(g, f)).collect::<homharm::Result<Vec<_>>>()?;
    let out = nonlinearity(&moved, spec, &orders, opts)?;
    let mut worst: f64 = 0.0;
    for (x, y) in out.iter().zip(&base) {
        let y = induced_action(g, y)?;
        let n: f64 = x.samples[0].iter().zip(&y.samples[0]).map(|(p, q)| (p - q).norm_sqr()).sum();
        let d: f64 = y.samples[0].iter().map(|q| q.norm_sqr()).sum();
        worst = worst.max((n / d).sqrt());
    }
    Ok(worst)
}

fn main() -> homharm::Result<()> {
    let b = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = QuadratureGrid::new(Space::S2, b)?;
    let fs = (-1..=1)
        .map(|k| TensorField::from_spectrum(&random::column(&mut rng, b, k, 1), &grid))
        .collect::<homharm::Result<Vec<_>>>()?;

    let aligned = GroupElement::So3(Rotation3::rz(3.0 * PI / b as f64));
    let generic = GroupElement::So3(random::rotation(&mut rng));
    for kind in [ActivationKind::Relu, ActivationKind::Gelu, ActivationKind::Tanh] {
        let spec = ActivationSpec::new(kind);
        println!("{kind:?}: grid-aligned error {:.1e}", error(&fs, &aligned, &spec, 2)?);
        for os in [1, 2, 4] {
            println!("  oversample x{os}: generic rotation error {:.2e}", error(&fs, &generic, &spec, os)?);
        }
    }
    Ok(())
}
