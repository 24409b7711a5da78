//! File formats, reports, rendering and the `aucslice` command line on top of
//! [`aucslice_core`].

pub mod cli;
pub mod dot;
pub mod error;
pub mod format;
pub mod io;
pub mod parallel;
pub mod report;
pub mod svg;

pub use error::{AppError, Result};
