//! Correlated geometric Brownian motion: N assets driven by N − 1 Brownian
//! motions, simulated with the exact log scheme at Δt = 1 day.
//!
//! The log-return of asset j on step m is
//! `(μ_j − ½ Σ_k σ_jk²) + Σ_k σ_jk Z_mk`, so a calibration on the output
//! recovers the log-drift `μ_j − ½‖σ_j‖²`, not `μ_j`. Oracles that compare
//! against closed forms must feed the same log-drift back in
//! (see [`GbmSpec::log_drift`]).
//!
//! Normals come from Box–Muller on a ChaCha8 stream seeded with
//! `seed_from_u64`, consumed row by row, factor by factor.

use alloc::vec::Vec;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::market::{self, Alignment, PriceSeries, ReturnMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct GbmSpec {
    /// Per-day drifts μ_j.
    pub mu: DVector<f64>,
    /// N×(N−1) per-day loadings σ_jk.
    pub sigma: DMatrix<f64>,
    /// Initial prices S_j0.
    pub s0: DVector<f64>,
    /// Number of price observations per asset, including S_0.
    pub steps: usize,
    pub seed: u64,
    /// Date of S_0; later observations follow on consecutive days.
    pub start_date: NaiveDate,
}

impl GbmSpec {
    pub fn new(mu: DVector<f64>, sigma: DMatrix<f64>, steps: usize, seed: u64) -> Self {
        let n = mu.len();
        Self {
            mu,
            sigma,
            s0: DVector::from_element(n, 100.0),
            steps,
            seed,
            start_date: NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.mu.len();
        if n < 2 {
            return Err(Error::InvalidInput("need at least 2 assets".into()));
        }
        if self.sigma.shape() != (n, n - 1) {
            return Err(Error::DimensionMismatch {
                context: "gbm sigma",
                expected: n * (n - 1),
                found: self.sigma.len(),
            });
        }
        if self.s0.len() != n {
            return Err(Error::DimensionMismatch {
                context: "gbm initial prices",
                expected: n,
                found: self.s0.len(),
            });
        }
        if self.s0.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidInput(
                "initial prices must be positive".into(),
            ));
        }
        if self
            .mu
            .iter()
            .chain(self.sigma.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("gbm parameters"));
        }
        if self.steps < 2 {
            return Err(Error::InvalidInput("need at least 2 steps".into()));
        }
        Ok(())
    }

    /// `μ_j − ½ Σ_k σ_jk²`, the mean daily log-return.
    pub fn log_drift(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.mu.len(),
            self.mu
                .iter()
                .zip(self.sigma.row_iter())
                .map(|(m, row)| m - 0.5 * row.norm_squared()),
        )
    }
}

/// Standard normals by Box–Muller; the second variate of each pair is kept.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on (0, 1].
    fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = 2.0 * core::f64::consts::PI * u2;
        self.spare = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }
}

/// Simulated prices and the matching log-return panel.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedMarket {
    pub prices: Vec<PriceSeries>,
    pub returns: ReturnMatrix,
}

/// Log-return increments `(μ_j − ½‖σ_j‖²) + Σ_k σ_jk Z_mk`, one row per step.
fn increments(spec: &GbmSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let n = spec.mu.len();
    let factors = n - 1;
    let drift = spec.log_drift();
    let mut normals = NormalStream::new(spec.seed);
    let mut out = DMatrix::zeros(spec.steps - 1, n);
    let mut z = alloc::vec![0.0; factors];
    for m in 0..spec.steps - 1 {
        z.iter_mut().for_each(|v| *v = normals.next());
        for j in 0..n {
            let shock: f64 = (0..factors).map(|k| spec.sigma[(j, k)] * z[k]).sum();
            out[(m, j)] = drift[j] + shock;
        }
    }
    Ok(out)
}

fn dates(spec: &GbmSpec) -> Vec<NaiveDate> {
    (0..spec.steps)
        .map(|i| spec.start_date + chrono::Duration::days(i as i64))
        .collect()
}

fn asset_ids(n: usize) -> Vec<alloc::string::String> {
    (1..=n).map(|j| alloc::format!("S{j}")).collect()
}

/// Simulates `spec`. The returned panel is `log_returns(prices)`.
///
/// Fails if a price leaves the positive finite range of `f64`; long
/// horizons with strongly negative log-drift should use
/// [`simulate_log_returns`] instead.
pub fn simulate_gbm(spec: &GbmSpec) -> Result<SimulatedMarket> {
    let inc = increments(spec)?;
    let n = spec.mu.len();
    let ids = asset_ids(n);
    let dates = dates(spec);
    let mut prices = Vec::with_capacity(n);
    for (j, id) in ids.into_iter().enumerate() {
        let mut log_price = libm::log(spec.s0[j]);
        let mut path = Vec::with_capacity(spec.steps);
        path.push(spec.s0[j]);
        for m in 0..spec.steps - 1 {
            log_price += inc[(m, j)];
            let p = libm::exp(log_price);
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::InvalidInput(alloc::format!(
                    "simulated price of {id} leaves the f64 range at step {}",
                    m + 1
                )));
            }
            path.push(p);
        }
        prices.push(PriceSeries::new(id, dates.clone(), path)?);
    }
    let returns = market::log_returns(&prices, Alignment::ErrorOnGap)?;
    Ok(SimulatedMarket { prices, returns })
}

/// The log-return panel of `spec` without materializing prices.
///
/// Uses the same normal stream as [`simulate_gbm`]; the two panels agree up
/// to the rounding of `ln(exp(a) / exp(b))` against `a − b`.
pub fn simulate_log_returns(spec: &GbmSpec) -> Result<ReturnMatrix> {
    let inc = increments(spec)?;
    ReturnMatrix::new(dates(spec).split_off(1), asset_ids(spec.mu.len()), inc)
}
