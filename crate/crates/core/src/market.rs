//! Price series, aligned log-return panels, percentile asset selection and
//! moving-window slicing.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Closing prices of one asset on a strictly increasing date grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    asset_id: String,
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(
        asset_id: impl Into<String>,
        dates: Vec<NaiveDate>,
        prices: Vec<f64>,
    ) -> Result<Self> {
        let asset_id = asset_id.into();
        if dates.len() != prices.len() {
            return Err(Error::DimensionMismatch {
                context: "price series",
                expected: dates.len(),
                found: prices.len(),
            });
        }
        if dates.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "series {asset_id} needs at least 2 observations"
            )));
        }
        if let Some(i) = prices.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "series {asset_id}: price {} on {} is not strictly positive",
                prices[i], dates[i]
            )));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!(
                "series {asset_id}: dates not strictly increasing at {}",
                w[1]
            )));
        }
        Ok(Self {
            asset_id,
            dates,
            prices,
        })
    }

    pub fn asset_id(&self) -> &str {
        &self.asset_id
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    fn price_on(&self, date: NaiveDate) -> Option<f64> {
        self.dates.binary_search(&date).ok().map(|i| self.prices[i])
    }
}

/// M×N panel of daily log-returns. Row `m` is dated by the close that ends
/// the return interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMatrix {
    dates: Vec<NaiveDate>,
    asset_ids: Vec<String>,
    values: DMatrix<f64>,
}

impl ReturnMatrix {
    pub fn new(
        dates: Vec<NaiveDate>,
        asset_ids: Vec<String>,
        values: DMatrix<f64>,
    ) -> Result<Self> {
        if values.nrows() != dates.len() {
            return Err(Error::DimensionMismatch {
                context: "return matrix rows",
                expected: dates.len(),
                found: values.nrows(),
            });
        }
        if values.ncols() != asset_ids.len() {
            return Err(Error::DimensionMismatch {
                context: "return matrix columns",
                expected: asset_ids.len(),
                found: values.ncols(),
            });
        }
        if asset_ids.is_empty() {
            return Err(Error::InvalidInput("return matrix has no assets".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("return matrix"));
        }
        if dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "return dates not strictly increasing".into(),
            ));
        }
        Ok(Self {
            dates,
            asset_ids,
            values,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Number of return rows (M).
    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    /// Number of assets (N).
    pub fn assets(&self) -> usize {
        self.values.ncols()
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.dates.last().copied()
    }
}

/// How dates are aligned across assets before differencing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alignment {
    /// Keep only dates on which every asset has a price.
    #[default]
    IntersectDates,
    /// Require every asset to share exactly the same calendar.
    ErrorOnGap,
}

/// Natural-log returns over the aligned date grid.
pub fn log_returns(series: &[PriceSeries], policy: Alignment) -> Result<ReturnMatrix> {
    let first = series
        .first()
        .ok_or_else(|| Error::InvalidInput("no price series supplied".into()))?;

    let grid: Vec<NaiveDate> = match policy {
        Alignment::IntersectDates => {
            let mut common: BTreeSet<NaiveDate> = first.dates.iter().copied().collect();
            for s in &series[1..] {
                let other: BTreeSet<NaiveDate> = s.dates.iter().copied().collect();
                common = common.intersection(&other).copied().collect();
            }
            common.into_iter().collect()
        }
        Alignment::ErrorOnGap => {
            let union: BTreeSet<NaiveDate> = series
                .iter()
                .flat_map(|s| s.dates.iter().copied())
                .collect();
            for s in series {
                if let Some(d) = union.iter().find(|d| s.dates.binary_search(d).is_err()) {
                    return Err(Error::DateGap {
                        asset: s.asset_id.clone(),
                        date: *d,
                    });
                }
            }
            first.dates.clone()
        }
    };
    if grid.len() < 2 {
        return Err(Error::FewCommonDates);
    }

    let rows = grid.len() - 1;
    let mut values = DMatrix::zeros(rows, series.len());
    for (j, s) in series.iter().enumerate() {
        let mut prev = s
            .price_on(grid[0])
            .expect("grid date present in every series");
        for (m, date) in grid[1..].iter().enumerate() {
            let p = s
                .price_on(*date)
                .expect("grid date present in every series");
            values[(m, j)] = libm::log(p / prev);
            prev = p;
        }
    }
    ReturnMatrix::new(
        grid[1..].to_vec(),
        series.iter().map(|s| s.asset_id.clone()).collect(),
        values,
    )
}

/// One row of the selection universe.
#[derive(Debug, Clone, PartialEq)]
pub struct UniverseEntry {
    pub asset_id: String,
    pub market_cap: f64,
}

impl UniverseEntry {
    pub fn new(asset_id: impl Into<String>, market_cap: f64) -> Result<Self> {
        let asset_id = asset_id.into();
        if !(market_cap.is_finite() && market_cap > 0.0) {
            return Err(Error::InvalidInput(format!(
                "market cap of {asset_id} must be positive, got {market_cap}"
            )));
        }
        Ok(Self {
            asset_id,
            market_cap,
        })
    }
}

/// Picks `n` assets at the (k − 0.5)/n capitalization percentiles.
///
/// The universe is sorted by market cap (ties broken by id), trimmed at both
/// ends until its size is divisible by `n` (the odd removal comes off the
/// bottom), and the survivor at 1-based index round_half_up((k − 0.5)·U/n) is
/// taken for k = 1..n. Output is in ascending capitalization order.
pub fn select_assets(universe: &[UniverseEntry], n: usize) -> Result<Vec<String>> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "selection count must be at least 1".into(),
        ));
    }
    if n > universe.len() {
        return Err(Error::SelectionTooLarge {
            requested: n,
            available: universe.len(),
        });
    }
    let mut sorted: Vec<&UniverseEntry> = universe.iter().collect();
    sorted.sort_by(|a, b| {
        a.market_cap
            .total_cmp(&b.market_cap)
            .then_with(|| a.asset_id.cmp(&b.asset_id))
    });

    let excess = sorted.len() % n;
    let bottom = excess.div_ceil(2);
    let top = excess / 2;
    let survivors = &sorted[bottom..sorted.len() - top];
    let u = survivors.len();

    // round_half_up((2k − 1)·U / 2n) in exact integer arithmetic
    Ok((1..=n)
        .map(|k| {
            let idx = ((2 * k - 1) * u + n) / (2 * n);
            survivors[idx - 1].asset_id.clone()
        })
        .collect())
}

/// Rows `end_index − m + 1 ..= end_index` of `r`.
pub fn window(r: &ReturnMatrix, end_index: usize, m: usize) -> Result<ReturnMatrix> {
    if m == 0 || m > end_index + 1 || end_index >= r.rows() {
        return Err(Error::InsufficientHistory {
            required: m,
            available: (end_index + 1).min(r.rows()),
        });
    }
    let start = end_index + 1 - m;
    Ok(ReturnMatrix {
        dates: r.dates[start..=end_index].to_vec(),
        asset_ids: r.asset_ids.clone(),
        values: r.values.rows(start, m).into_owned(),
    })
}
