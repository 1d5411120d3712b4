//! Two-qubit gates from two photons, linear optics and post-selection.

pub mod achievability;
pub mod cartan;
pub mod dilation;
pub mod error;
pub mod gatemap;
pub mod linalg;
pub mod probability;
mod quasi_newton;
pub mod solver;

pub use error::{Error, Result};
