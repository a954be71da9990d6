//! Steerable kernels on the plane: the angular part is a pure phase.

use std::f64::consts::FRAC_PI_2;

use homharm::se_kernels::{RadialProfile, SE2KernelBasis};
use nalgebra::Vector2;

fn main() {
    let radial = RadialProfile::from_fn(17, 2.0, |r| (-r * r).exp());
    for (m_in, m_out) in [(0, 0), (0, 1), (1, -1), (2, 4)] {
        let k = SE2KernelBasis::new(m_in, m_out, radial.clone());
        let x = Vector2::new(0.6, 0.3);
        let (s, c) = FRAC_PI_2.sin_cos();
        let rx = Vector2::new(c * x.x - s * x.y, s * x.x + c * x.y);
        println!(
            "m_in={m_in:+} m_out={m_out:+}: κ(x)={:.4}, κ(Rx)={:.4}, ratio={:.4}",
            k.eval(&x),
            k.eval(&rx),
            k.eval(&rx) / k.eval(&x)
        );
    }
}
