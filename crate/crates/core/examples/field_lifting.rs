//! Typed fields on the sphere: rotate them, lift them to SO(3), and see that the
//! lifted spectrum lives in a single column.

use homharm::fields::{induced_action, is_mackey, lift, project, FieldType, TensorField};
use homharm::groups::{GroupElement, QuadratureGrid, Space};
use homharm::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> homharm::Result<()> {
    let b = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let grid = QuadratureGrid::new(Space::S2, b)?;

    for k in -2i64..=2 {
        let f = TensorField::from_spectrum(&random::column(&mut rng, b, k, 1), &grid)?;
        let up = lift(&f);
        let spec = up.spectrum()?;
        let (mackey, residual) = is_mackey(&up, FieldType::so2(k), 1e-10);
        println!(
            "order {k:+}: off-column energy {:.1e} of {:.3}, Mackey {mackey} (residual {residual:.1e})",
            spec.off_column_energy(k),
            spec.weighted_energy()
        );
        let back = project(&up, FieldType::so2(k))?;
        assert_eq!(back.samples, f.samples);
    }

    // Rotating an order-1 field picks up the twist phase pointwise.
    let f = TensorField::from_spectrum(&random::column(&mut rng, b, 1, 1), &grid)?;
    let g = GroupElement::So3(random::rotation(&mut rng));
    let moved = induced_action(&g, &f)?;
    let energy = |t: &TensorField| t.spectrum().map(|s| s.weighted_energy());
    println!("energy before {:.6}, after rotation {:.6}", energy(&f)?, energy(&moved)?);
    Ok(())
}
