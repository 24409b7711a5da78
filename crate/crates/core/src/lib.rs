//! Attribution of a binary classifier's AUC-ROC to individual examples and to
//! (positive, negative) example pairs, plus decision-tree segmentation of those
//! attributions with honest leaf estimates.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and rendering live in the `aucslice` companion crate.
//!
//! ```
//! use aucslice_core::dataset::{EvalDataset, EvalRecord, FeatureValue, SchemaConfig};
//! use aucslice_core::metrics;
//!
//! let schema = SchemaConfig::new("label", [("model", "score")]);
//! let rows = [(0, 0.1), (1, 0.5), (0, 0.3), (1, 0.2), (0, 0.1), (1, 0.5)];
//! let records = rows
//!     .iter()
//!     .map(|&(label, score)| EvalRecord::new(label, vec![score], Vec::<FeatureValue>::new()))
//!     .collect();
//! let data = EvalDataset::new(schema, records).unwrap();
//! assert!((metrics::auc(&data, "model").unwrap() - 8.0 / 9.0).abs() < 1e-12);
//! ```
#![no_std]

extern crate alloc;

pub mod attribution;
pub mod dataset;
mod error;
pub mod metrics;
pub mod pairs;
pub mod rng;
pub mod segmentation;
pub mod stats;

pub use error::{Error, ErrorClass, Result};
