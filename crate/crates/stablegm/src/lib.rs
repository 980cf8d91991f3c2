//! File formats, a rayon executor and the command-line front end for
//! [`stablegm_core`].

pub mod cli;
pub mod error;
pub mod exec;
pub mod format;

pub use error::{Error, Result};
pub use exec::Parallel;
pub use stablegm_core as core;
