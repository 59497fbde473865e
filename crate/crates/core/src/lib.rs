//! Exact combinatorics and linear algebra for left-bottom patterns,
//! block-triangular matrices over prime fields, and the linear tree codes
//! they generate, together with reproducible probability experiments.

pub mod blocks;
pub mod cli;
pub mod codes;
pub mod error;
pub mod experiments;
pub mod field;
pub mod intmat;
pub mod patterns;
pub mod report;
pub mod textio;
pub mod util;

pub use error::{Error, Result};
