pub mod cli;
pub mod error;
pub mod evariables;
pub mod linalg;
pub mod qubit;
pub mod report;
pub mod spin;
pub mod spin_checks;
pub mod state_format;
pub mod suite;
pub mod symmetry;

pub use error::{Error, Result};
