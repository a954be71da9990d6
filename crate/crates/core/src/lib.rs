pub mod conv;
pub mod error;
pub mod groups;
pub mod fields;
pub mod harmonics;
pub mod io;
pub mod nonlin;
pub mod random;
pub mod se_kernels;
pub mod transforms;
pub mod verify;
#[cfg(test)]
mod util;

pub use error::{Error, Result};
