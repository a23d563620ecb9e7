//! File formats, the pipelined search driver, benchmarking and the command
//! line front end built on [`pqgraph_core`].

pub mod bench;
pub mod cli;
pub mod engine;
mod error;
pub mod io;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
