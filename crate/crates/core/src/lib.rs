pub mod cauchy;
pub mod cli;
pub mod dilatation;
pub mod error;
pub mod example5;
pub mod geometry;
pub mod quadrature;
pub mod semmes;
pub mod serde_util;

pub use error::{Error, Result};
