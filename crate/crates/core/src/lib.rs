//! Workbench for homomorphic encryption, encrypted control laws and
//! the IND-CPA / IND-PEA indistinguishability games.

pub mod adversaries;
pub mod controllers;
pub mod encoding;
pub mod error;
pub mod games;
pub mod modarith;
pub mod schemes;

pub use error::{Error, Result};
