//! File formats, parallel enumeration and the command-line front end for
//! [`chipfire_core`].

pub mod cli;
mod error;
pub mod formats;
pub mod parallel;

pub use crate::error::{Error, Result};

/// Version stamped on every text and JSON output.
pub const FORMAT_VERSION: u32 = 1;
