//! Parallel execution of the per-date map stage.
//!
//! The stateless part of every date (window, calibration, Φ, SVD, raw solve)
//! runs on the rayon pool; the clamp fold then walks the snapshots in date
//! order, so the rows equal those of the sequential engine bit for bit.

use rayon::prelude::*;
use srr_core::pipeline::{self, DateSnapshot};
use srr_core::{Error, PipelineConfig, ReturnMatrix, SrrEngine, SrrSeriesRow};

pub fn run_srr_series_parallel(
    r: &ReturnMatrix,
    cfg: &PipelineConfig,
) -> srr_core::Result<Vec<SrrSeriesRow>> {
    if r.rows() < cfg.window {
        return Err(Error::InsufficientHistory {
            required: cfg.window,
            available: r.rows(),
        });
    }
    let mut engine = SrrEngine::new(*cfg, r.assets())?;
    let snapshots: Vec<srr_core::Result<DateSnapshot>> = (pipeline::first_index(cfg)..r.rows())
        .into_par_iter()
        .map(|t| pipeline::prepare_date(r, t, cfg))
        .collect();
    snapshots
        .into_iter()
        .map(|snap| engine.fold(snap?))
        .collect()
}
