//! File formats, run manifests and parallel execution around `srr-core`.
//!
//! The `srr` binary wraps these into the `srr`, `simulate`, `stats`,
//! `select` and `min-rate` subcommands.

pub mod io;
pub mod manifest;
pub mod parallel;

pub use io::{IngestError, PriceLayout};
pub use manifest::{InputDigest, RunManifest};
pub use parallel::run_srr_series_parallel;
