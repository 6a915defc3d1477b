//! Experiment driver for disordered chiral quantum walks.
//!
//! The physics lives in `qwalk-core`; this crate adds worker pools, CSV and
//! JSON output, and the `qwalk` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod cli;
pub mod commands;
pub mod error;
pub mod input;
pub mod output;
pub mod parallel;

pub use error::{Error, Result};
