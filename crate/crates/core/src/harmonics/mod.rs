//! Irreducible representations of SO(3) and related special functions.

mod cg;
mod real;
mod sph;
mod wigner;

pub use cg::{clebsch_gordan, CgKey, CgTable, EXACT_MAX_DEGREE};
pub use real::{real_basis_change, real_sph_harm, real_wigner, to_complex_coeffs, to_real_coeffs};
pub use sph::{legendre_table, sph_harm, sph_harm_all};
#[allow(non_snake_case)]
pub use wigner::{wigner_D, wigner_D_all, wigner_d, wigner_d_all, WignerBlock};
