//! Moving-window SRR engine.
//!
//! Every date runs two stages. [`prepare_date`] is stateless: it slices the
//! trailing window, calibrates μ and Σ, factors Φ and attempts the raw LU
//! solve. [`SrrEngine::fold`] is the sequential part: it clamps the singular
//! values, re-solves with the clamped spectrum and applies the secondary
//! clamps to ν and each σ_πk. Snapshots can be produced in any order (or in
//! parallel) as long as they are folded in date order.
//!
//! The clamps seed on the first folded date, so early rows inherit whatever
//! transient the first window happens to sit in.

use alloc::vec::Vec;

use chrono::NaiveDate;
use nalgebra::DVector;

use crate::calibration::{self, CalibrationOptions, SigmaMethod};
use crate::error::{Error, Result};
use crate::market::{self, ReturnMatrix};
use crate::pca::CovarianceDivisor;
use crate::regularization::{ClampState, SingularValueRegularizer, SvdMode};
use crate::solver::{self, DeflatorSolution, PhiSystem, SvdFactors};

pub const DEFAULT_WINDOW: usize = 2500;
pub const DEFAULT_EPSILON: f64 = 0.005;
pub const DEFAULT_DELTA_NU: f64 = 1e-5;
pub const DEFAULT_DELTA_SIGMA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    /// Window length M in trading days.
    pub window: usize,
    pub method: SigmaMethod,
    /// Band for the singular-value clamp.
    pub epsilon: f64,
    /// Band for the secondary clamp on ν.
    pub delta_nu: f64,
    /// Band for the secondary clamp on each σ_πk.
    pub delta_sigma: f64,
    pub svd_mode: SvdMode,
    pub calibration: CalibrationOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::for_method(SigmaMethod::Direct)
    }
}

impl PipelineConfig {
    /// Defaults for `method`: the regression method clamps every singular
    /// value, the direct method only the smallest.
    pub fn for_method(method: SigmaMethod) -> Self {
        Self {
            window: DEFAULT_WINDOW,
            method,
            epsilon: DEFAULT_EPSILON,
            delta_nu: DEFAULT_DELTA_NU,
            delta_sigma: DEFAULT_DELTA_SIGMA,
            svd_mode: match method {
                SigmaMethod::Direct => SvdMode::MinOnly,
                SigmaMethod::Regression => SvdMode::All,
            },
            calibration: CalibrationOptions {
                covariance_divisor: CovarianceDivisor::SampleMinusOne,
                regression_divisor: CovarianceDivisor::SampleMinusOne,
            },
        }
    }

    pub fn validate(&self, assets: usize) -> Result<()> {
        if assets < 2 {
            return Err(Error::InvalidInput(
                "the pipeline needs at least 2 assets".into(),
            ));
        }
        if self.window <= assets {
            return Err(Error::InvalidInput(alloc::format!(
                "window {} must exceed the asset count {assets}",
                self.window
            )));
        }
        for (name, band) in [
            ("epsilon", self.epsilon),
            ("delta_nu", self.delta_nu),
            ("delta_sigma", self.delta_sigma),
        ] {
            if !(band > 0.0 && band < 1.0) {
                return Err(Error::InvalidInput(alloc::format!(
                    "{name} must lie in (0, 1), got {band}"
                )));
            }
        }
        Ok(())
    }
}

/// One output row. `None` marks a value that is not available on that date.
#[derive(Debug, Clone, PartialEq)]
pub struct SrrSeriesRow {
    pub date: NaiveDate,
    pub nu_raw: Option<f64>,
    pub nu_eps: Option<f64>,
    pub nu_hat: Option<f64>,
    pub sigma_pi_raw: Option<f64>,
    pub sigma_pi_hat: Option<f64>,
    pub kappa_raw: f64,
    pub kappa_eps: f64,
    pub d_min_raw: f64,
    pub d_min_eps: f64,
    /// ‖Φx − μ‖₂ of the regularized solution against the raw Φ.
    pub residual_norm: Option<f64>,
    /// Raw singular values of Φ, descending.
    pub singular_values: Vec<f64>,
}

/// Stateless per-date result.
#[derive(Debug, Clone)]
pub struct DateSnapshot {
    pub date: NaiveDate,
    pub system: PhiSystem,
    pub factors: SvdFactors,
    pub raw: Option<DeflatorSolution>,
}

/// Window → calibrate → Φ → SVD → raw LU solve for the row at `end_index`.
pub fn prepare_date(
    r: &ReturnMatrix,
    end_index: usize,
    cfg: &PipelineConfig,
) -> Result<DateSnapshot> {
    let w = market::window(r, end_index, cfg.window)?;
    let model = calibration::calibrate(&w, cfg.method, cfg.calibration)?;
    let system = solver::build_phi(&model.sigma, &model.mu)?;
    DateSnapshot::from_system(model.window_end_date, system)
}

impl DateSnapshot {
    /// Snapshot for an already-assembled system, bypassing calibration.
    pub fn from_system(date: NaiveDate, system: PhiSystem) -> Result<Self> {
        let factors = SvdFactors::of(system.phi())?;
        let raw = solver::solve_lu(&system).ok();
        Ok(Self {
            date,
            system,
            factors,
            raw,
        })
    }
}

/// Carries the clamp states across dates.
#[derive(Debug, Clone, PartialEq)]
pub struct SrrEngine {
    cfg: PipelineConfig,
    singulars: SingularValueRegularizer,
    nu: ClampState,
    sigma_pi: Vec<ClampState>,
}

impl SrrEngine {
    pub fn new(cfg: PipelineConfig, assets: usize) -> Result<Self> {
        cfg.validate(assets)?;
        Ok(Self {
            singulars: SingularValueRegularizer::new(assets, cfg.epsilon, cfg.svd_mode)?,
            nu: ClampState::new(cfg.delta_nu)?,
            sigma_pi: alloc::vec![ClampState::new(cfg.delta_sigma)?; assets - 1],
            cfg,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    /// Clamps, re-solves and emits the row for `snap`.
    pub fn fold(&mut self, snap: DateSnapshot) -> Result<SrrSeriesRow> {
        let d = &snap.factors.d;
        let regularized = self.singulars.apply(d)?;
        let d_bar = regularized.d_bar;
        let reg = solver::solve_with_factors(&snap.system, &snap.factors, Some(&d_bar)).ok();

        let (nu_hat, sigma_pi_hat) = match &reg {
            Some(sol) => {
                let nu_hat = self.nu.clamp(sol.nu);
                let components: Vec<f64> = self
                    .sigma_pi
                    .iter_mut()
                    .zip(sol.sigma_pi_vec.iter())
                    .map(|(state, s)| state.clamp(*s))
                    .collect();
                (Some(nu_hat), Some(solver::total_volatility(&components)))
            }
            None => (None, None),
        };

        Ok(SrrSeriesRow {
            date: snap.date,
            nu_raw: snap.raw.as_ref().map(|s| s.nu),
            nu_eps: reg.as_ref().map(|s| s.nu),
            nu_hat,
            sigma_pi_raw: snap.raw.as_ref().map(|s| s.sigma_pi_total),
            sigma_pi_hat,
            kappa_raw: solver::kappa_of(d),
            kappa_eps: solver::kappa_of(&d_bar),
            d_min_raw: d.min(),
            d_min_eps: d_bar.min(),
            residual_norm: reg.as_ref().map(|s| s.residual_norm),
            singular_values: d.iter().copied().collect(),
        })
    }

    /// Runs rows `start..=end` of `r` through this engine.
    pub fn run_range(
        &mut self,
        r: &ReturnMatrix,
        start: usize,
        end: usize,
    ) -> Result<Vec<SrrSeriesRow>> {
        if r.assets() != self.singulars.states().len() {
            return Err(Error::DimensionMismatch {
                context: "engine asset count",
                expected: self.singulars.states().len(),
                found: r.assets(),
            });
        }
        (start..=end)
            .map(|t| prepare_date(r, t, &self.cfg).and_then(|snap| self.fold(snap)))
            .collect()
    }
}

/// First row index that has a full trailing window.
pub fn first_index(cfg: &PipelineConfig) -> usize {
    cfg.window - 1
}

/// The full SRR series: one row per date from the first full window onward.
pub fn run_srr_series(r: &ReturnMatrix, cfg: &PipelineConfig) -> Result<Vec<SrrSeriesRow>> {
    if r.rows() < cfg.window {
        return Err(Error::InsufficientHistory {
            required: cfg.window,
            available: r.rows(),
        });
    }
    let mut engine = SrrEngine::new(*cfg, r.assets())?;
    engine.run_range(r, first_index(cfg), r.rows() - 1)
}

/// `(σ̂_π, ν̂)` pairs for dates where both are available.
pub fn trajectory(rows: &[SrrSeriesRow]) -> Vec<(f64, f64)> {
    rows.iter()
        .filter_map(|row| Some((row.sigma_pi_hat?, row.nu_hat?)))
        .collect()
}

/// Raw singular values of every row, for the spectrum dump.
pub fn singular_value_table(rows: &[SrrSeriesRow]) -> Vec<(NaiveDate, DVector<f64>)> {
    rows.iter()
        .map(|row| (row.date, DVector::from_column_slice(&row.singular_values)))
        .collect()
}
