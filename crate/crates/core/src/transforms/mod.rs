//! Harmonic analysis on S² and SO(3).
//!
//! Normalization: Haar measures have total mass one, the forward SO(3)
//! transform is `∫ f conj(D)`, and the inverse carries the `(2l+1)` weights,
//! so `∫|f|² = Σ_l (2l+1) ‖f̂^l‖²`.

mod ops;
mod spectra;
mod tables;

pub use ops::{
    fiber_dft, sht_analyze, sht_evaluate, sht_forward, sht_inverse, sht_synthesize, so3_ft_forward,
    so3_ft_inverse, so3_synthesize, spin_analysis, spin_evaluate, spin_synthesis,
};
pub use spectra::{ColumnSpectrum, ShtCoeffs, SpectralBlocks};
pub(crate) use spectra::check_order;

#[cfg(test)]
mod tests;
