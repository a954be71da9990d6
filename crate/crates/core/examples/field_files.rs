//! Write a sampled field as JSON and CSV, then read both back.

use homharm::fields::TensorField;
use homharm::groups::{QuadratureGrid, Space};
use homharm::io::{convert_field, FieldFile};
use homharm::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> homharm::Result<()> {
    let b = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = QuadratureGrid::new(Space::S2, b)?;
    let fields = [0, 2]
        .iter()
        .map(|&k| TensorField::from_spectrum(&random::column(&mut rng, b, k, 1), &grid))
        .collect::<homharm::Result<Vec<_>>>()?;
    let file = FieldFile::from_fields(&fields)?;

    let dir = std::env::temp_dir().join("homharm-example");
    std::fs::create_dir_all(&dir)?;
    let json = dir.join("field.json");
    let csv = dir.join("field.csv");
    file.write(&json)?;
    convert_field(&json, &csv)?;
    let text = std::fs::read_to_string(&csv)?;
    println!("{} CSV lines; first rows:", text.lines().count());
    for line in text.lines().take(4) {
        println!("  {line}");
    }
    let back = FieldFile::read(&csv)?;
    println!("lossless round trip: {}", back == file);
    println!("orders {:?}, {} nodes", back.field_orders, back.to_fields()?[0].grid.len());
    Ok(())
}
