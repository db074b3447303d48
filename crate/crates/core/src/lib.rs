//! Shadow riskless rate estimation for a market of N risky assets.
//!
//! Asset prices are modelled as correlated geometric Brownian motions driven
//! by N − 1 Brownian motions. The state-price deflator of such a market has a
//! drift `μ_π` and loadings `σ_πk` fixed by the linear system
//! `[𝟙, −Σ] [ν, σ_π]ᵀ = μ`; the shadow riskless rate is `ν = −μ_π`.
//!
//! The crate is `no_std` (with `alloc`) and contains the whole numerical
//! path:
//!
//! - [`market`]: price series, aligned log-return panels, asset selection
//!   and window slicing
//! - [`pca`]: principal components of a centered panel
//! - [`calibration`]: μ and Σ for one window (direct or regression method)
//! - [`solver`]: the deflator system by LU, SVD and determinant ratio
//! - [`regularization`]: the recursive relative-band clamp
//! - [`pipeline`]: the moving-window engine
//! - [`synthetic`]: seeded correlated-GBM markets with known parameters
//! - [`analysis`]: quantile summaries and the minimum-variance rate
//!
//! File formats, the CLI and parallel execution live in the `srr` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod calibration;
pub mod error;
pub mod linalg;
pub mod market;
pub mod pca;
pub mod pipeline;
pub mod regularization;
pub mod solver;
pub mod synthetic;

pub use chrono::NaiveDate;
pub use nalgebra::{DMatrix, DVector};

pub use calibration::{calibrate, CalibratedModel, CalibrationOptions, SigmaMethod};
pub use error::{Error, Result};
pub use market::{Alignment, PriceSeries, ReturnMatrix, UniverseEntry};
pub use pca::{CovarianceDivisor, PcaResult};
pub use pipeline::{run_srr_series, PipelineConfig, SrrEngine, SrrSeriesRow};
pub use regularization::{ClampState, SvdMode};
pub use solver::{DeflatorSolution, PhiSystem, SvdFactors};
pub use synthetic::{simulate_gbm, simulate_log_returns, GbmSpec, SimulatedMarket};
