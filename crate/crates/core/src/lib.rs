pub mod config;
pub mod error;
pub mod exponent;
pub mod expsum;
pub mod gaussian;
pub mod hyp;
pub mod kernel;
pub mod moment;
pub mod par;
pub mod quad;
pub mod special;
pub mod table;
pub mod verify;
pub mod zagier;
pub mod zeta;

pub use error::{Error, Result};
pub use gaussian::GaussianInt;
pub use num_complex::Complex64;
