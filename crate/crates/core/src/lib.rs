pub mod analytic;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod pair;
pub mod rotor;
pub mod search;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use nalgebra;
