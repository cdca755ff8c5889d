//! Simulation harness, artifact formats and validation suite for
//! differential amplify-and-forward dual-hop relaying.
//!
//! The numerical core lives in [`ddh_core`] and is re-exported as [`core`].

pub use ddh_core as core;

pub mod cli;
pub mod harness;
pub mod output;
pub mod theory;
pub mod validate;
