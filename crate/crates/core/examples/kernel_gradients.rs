//! Fit sparse kernel coefficients by gradient descent using the vector-Jacobian
//! product of the spectral convolution.

use homharm::conv::{conv_column, conv_vjp, SparseKernelSpec};
use homharm::random;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> homharm::Result<()> {
    let b = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let input = random::column(&mut rng, b, 1, 2);
    let target_kernel = SparseKernelSpec::from_fn(1, -1, b, 1, 2, |_, _, _| random::complex(&mut rng))?;
    let target = conv_column(&input, &target_kernel)?;

    let mut k = SparseKernelSpec::zeros(1, -1, b, 1, 2)?;
    // The loss separates over degree; step each degree by the inverse trace of its input Gram matrix.
    let steps: Vec<f64> = (0..b)
        .map(|l| input.coeffs.iter().flat_map(|ch| &ch[l]).map(|z| z.norm_sqr()).sum::<f64>())
        .map(|e| if e > 0.0 { 1.0 / e } else { 0.0 })
        .collect();
    for step in 0..=200 {
        let y = conv_column(&input, &k)?;
        let mut resid = y.clone();
        let mut loss = 0.0;
        for (r, t) in resid.coeffs.iter_mut().flatten().flatten().zip(target.coeffs.iter().flatten().flatten()) {
            *r -= t;
            loss += 0.5 * r.norm_sqr();
        }
        if step % 40 == 0 {
            println!("step {step:>3}: loss {loss:.3e}");
        }
        let (_, grad) = conv_vjp(&input, &k, &resid)?;
        for (kc, gc) in k.coeffs.iter_mut().flatten().zip(grad.coeffs.iter().flatten()) {
            // Kernel degrees start at max(|m_in|, |m_out|) = 1.
            for (j, (c, g)) in kc.iter_mut().zip(gc).enumerate() {
                *c -= Complex64::new(steps[j + 1], 0.0) * g;
            }
        }
    }
    let err = k.coeffs.iter().flatten().flatten().zip(target_kernel.coeffs.iter().flatten().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("max coefficient error after fitting: {err:.2e}");
    Ok(())
}
