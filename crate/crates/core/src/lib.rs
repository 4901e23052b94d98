//! The 18-test Kochen-Specker set in dimension four.

pub mod algebra;
pub mod certify;
pub mod cli;
pub mod classical;
pub mod error;
pub mod graph;
pub mod invariants;
pub mod ksets;
pub mod quantum;
pub mod report;

pub use error::{Error, Result};
