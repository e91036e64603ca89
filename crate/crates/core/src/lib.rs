pub mod dynamics;
pub mod error;
pub mod forces;
pub mod grid;
pub mod model;
pub mod pulse;
pub mod quadrature;
pub mod scattering;
pub mod spectrum;
pub mod validation;

pub use error::{Error, Result};
