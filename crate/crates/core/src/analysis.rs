//! Summary statistics of output series and the minimum-variance rate over
//! principal-component composites.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::pca::PcaResult;

/// Composites whose variance is at or below this fraction of λ_1 count as
/// zero-variance.
pub const ZERO_LAMBDA_RATIO: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileSummary {
    pub count: usize,
    pub min: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub max: f64,
    pub mean: f64,
}

/// Quantile of sorted data by linear interpolation at position `1 + (n − 1)p`.
fn interpolate(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Quartiles, extremes and mean of the finite values in `series`.
pub fn quantiles(series: &[f64]) -> Result<QuantileSummary> {
    let mut sorted: Vec<f64> = series.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.is_empty() {
        return Err(Error::EmptySeries);
    }
    sorted.sort_by(f64::total_cmp);
    let count = sorted.len();
    Ok(QuantileSummary {
        count,
        min: sorted[0],
        p25: interpolate(&sorted, 0.25),
        p50: interpolate(&sorted, 0.5),
        p75: interpolate(&sorted, 0.75),
        max: sorted[count - 1],
        mean: sorted.iter().sum::<f64>() / count as f64,
    })
}

/// Which portfolio the composite loop reports once a step breaches tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BreachReport {
    /// The portfolio that breached, as the loop is written.
    #[default]
    Breaching,
    /// The last portfolio before the breach.
    Previous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ToleranceBreach,
    /// The next composite has zero variance.
    ZeroVariance,
    /// Every composite was added.
    Exhausted,
}

/// One minimum-variance portfolio over composites `1..=count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeStep {
    pub count: usize,
    pub r: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinRateResult {
    pub j_star: usize,
    /// Per-day mean return of the reported portfolio.
    pub r: f64,
    /// Its per-day standard deviation.
    pub sigma_r: f64,
    /// Long-only weights over composites `1..=j_star`, summing to one.
    pub weights: DVector<f64>,
    pub stop: StopReason,
    /// Every portfolio computed, starting at `k0`.
    pub path: Vec<CompositeStep>,
}

/// Mean return of each composite `w_◦jᵀ r`: the component mean plus the
/// projection of the removed column means.
pub fn composite_means(p: &PcaResult, mean_returns: &DVector<f64>) -> Result<DVector<f64>> {
    let n = p.dim();
    if mean_returns.len() != n {
        return Err(Error::DimensionMismatch {
            context: "mean returns",
            expected: n,
            found: mean_returns.len(),
        });
    }
    let rows = p.components.nrows().max(1) as f64;
    Ok(DVector::from_iterator(
        n,
        (0..n).map(|j| {
            p.components.column(j).sum() / rows + p.eigenvectors.column(j).dot(mean_returns)
        }),
    ))
}

/// Uncorrelated composites: q_i ∝ 1/λ_i, r = Σ q_i m_i, σ = √(Σ q_i² λ_i).
fn composite_portfolio(lambda: &[f64], means: &[f64]) -> (DVector<f64>, f64, f64) {
    let inv: Vec<f64> = lambda.iter().map(|l| 1.0 / l).collect();
    let total: f64 = inv.iter().sum();
    let q = DVector::from_iterator(inv.len(), inv.iter().map(|v| v / total));
    let r = q.iter().zip(means).map(|(q, m)| q * m).sum();
    let var: f64 = q.iter().zip(lambda).map(|(q, l)| q * q * l).sum();
    (q, r, libm::sqrt(var))
}

/// Grows the composite set from `k0` until σ_p or r_p increases by more than
/// its tolerance, a zero-variance composite is reached, or all are used.
pub fn min_rate(
    p: &PcaResult,
    mean_returns: &DVector<f64>,
    k0: usize,
    tol_sigma: f64,
    tol_r: f64,
    report: BreachReport,
) -> Result<MinRateResult> {
    let n = p.dim();
    if k0 < 1 || k0 >= n {
        return Err(Error::InvalidInput(alloc::format!(
            "starting composite count must satisfy 1 <= k0 < N = {n}, got {k0}"
        )));
    }
    if !(tol_sigma > 0.0 && tol_r > 0.0) {
        return Err(Error::InvalidInput("tolerances must be positive".into()));
    }
    let means = composite_means(p, mean_returns)?;
    let lambda = p.eigenvalues.as_slice();
    let floor = ZERO_LAMBDA_RATIO * lambda[0];
    if let Some(i) = (0..k0).find(|&i| !(lambda[i] > floor)) {
        return Err(Error::ZeroVariance { index: i });
    }

    let step = |j: usize| {
        let (q, r, sigma) = composite_portfolio(&lambda[..j], &means.as_slice()[..j]);
        (q, CompositeStep { count: j, r, sigma })
    };

    let (mut q_prev, mut prev) = step(k0);
    let mut path = alloc::vec![prev];
    let mut j = k0;
    let stop = loop {
        if j == n {
            break StopReason::Exhausted;
        }
        if !(lambda[j] > floor) {
            break StopReason::ZeroVariance;
        }
        j += 1;
        let (q, cur) = step(j);
        path.push(cur);
        if cur.sigma - prev.sigma > tol_sigma || cur.r - prev.r > tol_r {
            if report == BreachReport::Breaching {
                q_prev = q;
                prev = cur;
            }
            break StopReason::ToleranceBreach;
        }
        q_prev = q;
        prev = cur;
    };

    Ok(MinRateResult {
        j_star: prev.count,
        r: prev.r,
        sigma_r: prev.sigma,
        weights: q_prev,
        stop,
        path,
    })
}

/// Long-only minimum-variance portfolio on the original assets.
#[derive(Debug, Clone, PartialEq)]
pub struct FullUniverse {
    pub r_n: f64,
    pub sigma_r_n: f64,
    pub weights: DVector<f64>,
    pub iterations: usize,
}

/// Bounded iteration count for [`long_only_min_variance`].
pub const MAX_PAIR_ITERATIONS: usize = 1_000_000;

/// Minimizes `wᵀCw` over the simplex by pairwise coordinate descent: each
/// step moves weight from the held asset with the largest gradient to the
/// asset with the smallest, with an exact line search clipped at zero.
pub fn long_only_min_variance(covariance: &DMatrix<f64>) -> Result<(DVector<f64>, usize)> {
    let n = covariance.nrows();
    if n == 0 || covariance.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "covariance (square)",
            expected: n,
            found: covariance.ncols(),
        });
    }
    if covariance.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("covariance"));
    }
    let scale = covariance.diagonal().amax().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;
    let mut w = DVector::from_element(n, 1.0 / n as f64);
    let mut grad = covariance * &w * 2.0;

    for iteration in 0..MAX_PAIR_ITERATIONS {
        let (mut hi, mut lo) = (usize::MAX, 0);
        for i in 0..n {
            if w[i] > 0.0 && (hi == usize::MAX || grad[i] > grad[hi]) {
                hi = i;
            }
            if grad[i] < grad[lo] {
                lo = i;
            }
        }
        let gap = grad[hi] - grad[lo];
        if gap <= tol {
            return Ok((w, iteration));
        }
        let curvature = covariance[(hi, hi)] + covariance[(lo, lo)] - 2.0 * covariance[(hi, lo)];
        let t = if curvature > 0.0 {
            (gap / (2.0 * curvature)).min(w[hi])
        } else {
            w[hi]
        };
        w[hi] -= t;
        w[lo] += t;
        if w[hi] < 0.0 {
            w[hi] = 0.0;
        }
        for i in 0..n {
            grad[i] += 2.0 * t * (covariance[(i, lo)] - covariance[(i, hi)]);
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_PAIR_ITERATIONS,
    })
}

/// The full-universe counterpart `(r^(N), σ_r^(N))` of a composite result.
pub fn compare_full_universe(
    mean_returns: &DVector<f64>,
    sample_covariance: &DMatrix<f64>,
) -> Result<FullUniverse> {
    if mean_returns.len() != sample_covariance.nrows() {
        return Err(Error::DimensionMismatch {
            context: "mean returns",
            expected: sample_covariance.nrows(),
            found: mean_returns.len(),
        });
    }
    let (weights, iterations) = long_only_min_variance(sample_covariance)?;
    let variance = weights.dot(&(sample_covariance * &weights));
    Ok(FullUniverse {
        r_n: weights.dot(mean_returns),
        sigma_r_n: libm::sqrt(variance.max(0.0)),
        weights,
        iterations,
    })
}
