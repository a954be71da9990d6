//! Clebsch–Gordan coefficients and Wigner matrices. Writes the CG table as CSV
//! to stdout when run with `--csv`.

use homharm::groups::Rotation3;
use homharm::harmonics::{clebsch_gordan, real_wigner, wigner_D, CgTable};

fn main() -> homharm::Result<()> {
    if std::env::args().any(|a| a == "--csv") {
        return CgTable::new(3).write_csv(std::io::stdout().lock());
    }
    println!("⟨1 1 1 -1 | 0 0⟩ = {:.6}", clebsch_gordan(1, 1, 1, -1, 0, 0));
    println!("⟨1 1 1 0 | 2 1⟩  = {:.6}", clebsch_gordan(1, 1, 1, 0, 2, 1));
    println!("⟨2 0 2 0 | 2 0⟩  = {:.6}", clebsch_gordan(2, 0, 2, 0, 2, 0));
    let table = CgTable::new(4);
    println!("{} nonzero coefficients up to degree 4", table.len());

    let g = Rotation3::from_euler(0.4, 1.0, -0.7);
    let d = real_wigner(&wigner_D(1, &g));
    println!("real D^1 for (0.4, 1.0, -0.7):\n{d:.5}");
    println!("rotation matrix:\n{:.5}", g.matrix());
    Ok(())
}
