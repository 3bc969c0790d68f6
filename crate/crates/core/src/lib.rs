pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod kappa;
pub mod norms;
pub mod oracles;

pub use error::{Error, Result};
