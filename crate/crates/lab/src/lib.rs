//! Command-line front end for the channel toolkit: JSON formats, parallel
//! drivers, and a registry of reproducible verification checks.

pub mod checks;
pub mod cli;
mod error;
pub mod json;
pub mod run;

pub use error::{LabError, LabResult};
