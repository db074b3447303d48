//! The recursive relative-band clamp and its uses: limiting the day-to-day
//! change of Φ's singular values, and secondary smoothing of the ν and σ_πk
//! series.
//!
//! Each step lets a value move at most a fraction `ε` of the previous clamped
//! value's magnitude:
//!
//! ```text
//! out_t = min(raw_t, prev + ε|prev|)   if raw_t ≥ prev
//! out_t = max(raw_t, prev − ε|prev|)   if raw_t < prev
//! out_0 = raw_0
//! ```
//!
//! For positive `prev` the edges are `(1 ± ε)·prev`. Writing them with
//! `|prev|` keeps the output between `prev` and `raw` when a series such as
//! ν runs negative. A previous value of exactly zero has no band; the raw
//! value passes through and re-seeds the recursion.

use alloc::vec::Vec;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Memory of one clamped series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampState {
    previous: f64,
    epsilon: f64,
    initialized: bool,
}

impl ClampState {
    /// A fresh state; `epsilon` must lie in `(0, 1)`.
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidInput(alloc::format!(
                "clamp band must lie in (0, 1), got {epsilon}"
            )));
        }
        Ok(Self {
            previous: 0.0,
            epsilon,
            initialized: false,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The last clamped value, once seeded.
    pub fn previous(&self) -> Option<f64> {
        self.initialized.then_some(self.previous)
    }

    /// Band edges `(lower, upper)` around the current previous value.
    pub fn band(&self) -> Option<(f64, f64)> {
        self.previous().map(|p| band_edges(p, self.epsilon))
    }

    /// Clamps `raw` against the band and records the result.
    pub fn clamp(&mut self, raw: f64) -> f64 {
        let out = match self.band() {
            Some((lower, upper)) if self.previous != 0.0 => {
                if raw >= self.previous {
                    raw.min(upper)
                } else {
                    raw.max(lower)
                }
            }
            _ => raw,
        };
        self.previous = out;
        self.initialized = true;
        out
    }
}

/// `(lower, upper)` = `((1 − ε)p, (1 + ε)p)` for `p > 0`, mirrored for `p < 0`.
///
/// Each edge is pulled toward `p` by whole ulps until `|edge − p| ≤ ε|p|`
/// holds exactly, so the rounding of `1 ± ε` can never widen the band.
pub fn band_edges(previous: f64, epsilon: f64) -> (f64, f64) {
    let (lower, upper) = if previous >= 0.0 {
        ((1.0 - epsilon) * previous, (1.0 + epsilon) * previous)
    } else {
        ((1.0 + epsilon) * previous, (1.0 - epsilon) * previous)
    };
    (
        inside_band(lower, previous, epsilon),
        inside_band(upper, previous, epsilon),
    )
}

/// True when `|x − p| ≤ ε|p|` in exact arithmetic. For `x` within a factor of
/// two of `p` the difference is exact, and the fused product rounds once,
/// which keeps the sign of `ε|p| − |x − p|`.
pub fn within_band(x: f64, previous: f64, epsilon: f64) -> bool {
    libm::fma(epsilon, previous.abs(), -(x - previous).abs()) >= 0.0
}

fn inside_band(mut edge: f64, previous: f64, epsilon: f64) -> f64 {
    while !within_band(edge, previous, epsilon) {
        edge = if edge > previous {
            edge.next_down()
        } else {
            edge.next_up()
        };
    }
    edge
}

/// Functional form of [`ClampState::clamp`].
pub fn clamp(state: ClampState, raw: f64) -> (f64, ClampState) {
    let mut next = state;
    let out = next.clamp(raw);
    (out, next)
}

/// Which singular values of Φ are clamped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SvdMode {
    /// Only the smallest, which governs the condition number.
    #[default]
    MinOnly,
    /// Every singular value, each with its own state.
    All,
}

/// Singular values after clamping.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedSvd {
    pub d_bar: DVector<f64>,
    pub mode: SvdMode,
}

/// Clamps `d` in place of the stored states. `states` holds one entry per
/// singular value; in [`SvdMode::MinOnly`] only the last is touched.
pub fn regularize_singulars(
    d: &DVector<f64>,
    states: &mut [ClampState],
    mode: SvdMode,
) -> Result<RegularizedSvd> {
    if states.len() != d.len() {
        return Err(Error::DimensionMismatch {
            context: "clamp states",
            expected: d.len(),
            found: states.len(),
        });
    }
    if d.is_empty() {
        return Err(Error::InvalidInput("no singular values".into()));
    }
    let mut d_bar = d.clone();
    match mode {
        SvdMode::MinOnly => {
            let last = d.len() - 1;
            d_bar[last] = states[last].clamp(d[last]);
        }
        SvdMode::All => {
            for (i, state) in states.iter_mut().enumerate() {
                d_bar[i] = state.clamp(d[i]);
            }
        }
    }
    Ok(RegularizedSvd { d_bar, mode })
}

/// Owns the per-index states for [`regularize_singulars`].
#[derive(Debug, Clone, PartialEq)]
pub struct SingularValueRegularizer {
    states: Vec<ClampState>,
    mode: SvdMode,
}

impl SingularValueRegularizer {
    pub fn new(dim: usize, epsilon: f64, mode: SvdMode) -> Result<Self> {
        let state = ClampState::new(epsilon)?;
        Ok(Self {
            states: alloc::vec![state; dim],
            mode,
        })
    }

    pub fn apply(&mut self, d: &DVector<f64>) -> Result<RegularizedSvd> {
        regularize_singulars(d, &mut self.states, self.mode)
    }

    pub fn states(&self) -> &[ClampState] {
        &self.states
    }

    pub fn mode(&self) -> SvdMode {
        self.mode
    }
}

/// Folds the clamp over `series` with band `delta`, seeded at the first element.
pub fn secondary_regularize(series: &[f64], delta: f64) -> Result<Vec<f64>> {
    let mut state = ClampState::new(delta)?;
    Ok(series.iter().map(|&v| state.clamp(v)).collect())
}
