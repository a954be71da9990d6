use num_complex::Complex64;

/// Largest modulus in a sequence of complex numbers.
pub(crate) fn max_norm<'a>(it: impl IntoIterator<Item = &'a Complex64>) -> f64 {
    it.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}
