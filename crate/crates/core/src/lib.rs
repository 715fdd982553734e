pub mod cli;
pub mod coeffs;
pub mod cohen;
pub mod error;
pub mod lattice;
pub mod qfield;
pub mod specfun;
pub mod thetaseries;
pub mod verify;

pub use error::{Error, Result};
