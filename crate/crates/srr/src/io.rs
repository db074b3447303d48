//! CSV formats: price files (long and wide layout), universe files, the
//! per-date series and the singular-value dump.
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64` (Rust's `Debug` formatting, e.g. `0.5`, `100.0`, `1e-20`), so a file
//! read back and re-written is byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use srr_core::{NaiveDate, PriceSeries, SrrSeriesRow, UniverseEntry};

/// Header of the per-date series file.
pub const SERIES_HEADER: [&str; 11] = [
    "date",
    "nu_raw",
    "nu_eps",
    "nu_hat",
    "sigma_pi_raw",
    "sigma_pi_hat",
    "kappa_raw",
    "kappa_eps",
    "d_min_raw",
    "d_min_eps",
    "residual_norm",
];

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: duplicate entry for asset {asset} on {date}")]
    Duplicate {
        line: u64,
        asset: String,
        date: NaiveDate,
    },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] srr_core::Error),
}

pub type Result<T> = std::result::Result<T, IngestError>;

/// Layout of a price file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PriceLayout {
    /// `date,asset_id,price`, one observation per row.
    Long,
    /// `date,<id1>,<id2>,...`, one date per row; empty cells are missing.
    Wide,
    /// Long if the header is exactly `date,asset_id,price`, wide otherwise.
    #[default]
    Auto,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn row_error(line: u64, message: impl Into<String>) -> IngestError {
    IngestError::Row {
        line,
        message: message.into(),
    }
}

fn reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn csv_error(e: csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    row_error(line, e.to_string())
}

fn parse_date(text: &str, line: u64) -> Result<NaiveDate> {
    text.parse()
        .map_err(|_| row_error(line, format!("unparseable date {text:?}")))
}

fn parse_price(text: &str, line: u64) -> Result<f64> {
    let value: f64 = text
        .parse()
        .map_err(|_| row_error(line, format!("unparseable price {text:?}")))?;
    if !(value.is_finite() && value > 0.0) {
        return Err(row_error(
            line,
            format!("price must be positive, got {text}"),
        ));
    }
    Ok(value)
}

/// Reads a price file into one series per asset, sorted by date.
pub fn load_prices(path: &Path, layout: PriceLayout) -> Result<Vec<PriceSeries>> {
    parse_prices(&read(path)?, layout)
}

/// As [`load_prices`], from bytes already in memory.
pub fn parse_prices(bytes: &[u8], layout: PriceLayout) -> Result<Vec<PriceSeries>> {
    let mut rdr = reader(bytes);
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_owned)
        .collect();
    let layout = match layout {
        PriceLayout::Auto if header == ["date", "asset_id", "price"] => PriceLayout::Long,
        PriceLayout::Auto => PriceLayout::Wide,
        other => other,
    };

    // asset order: header order (wide) or first appearance (long)
    let mut order: Vec<String> = Vec::new();
    let mut observations: BTreeMap<String, BTreeMap<NaiveDate, f64>> = BTreeMap::new();
    let mut insert = |asset: &str, date: NaiveDate, price: f64, line: u64| -> Result<()> {
        let entry = observations.entry(asset.to_owned()).or_insert_with(|| {
            order.push(asset.to_owned());
            BTreeMap::new()
        });
        if entry.insert(date, price).is_some() {
            return Err(IngestError::Duplicate {
                line,
                asset: asset.to_owned(),
                date,
            });
        }
        Ok(())
    };

    match layout {
        PriceLayout::Long => {
            if header.len() != 3 {
                return Err(row_error(
                    1,
                    "long layout needs columns date,asset_id,price",
                ));
            }
            for record in rdr.records() {
                let record = record.map_err(csv_error)?;
                let line = line_of(&record);
                let date = parse_date(&record[0], line)?;
                if record[1].is_empty() {
                    return Err(row_error(line, "empty asset id"));
                }
                insert(&record[1], date, parse_price(&record[2], line)?, line)?;
            }
        }
        PriceLayout::Wide | PriceLayout::Auto => {
            if header.len() < 2 || header[0] != "date" {
                return Err(row_error(
                    1,
                    "wide layout needs a date column followed by asset columns",
                ));
            }
            let mut seen = std::collections::BTreeSet::new();
            if let Some(dup) = header[1..].iter().find(|id| !seen.insert(id.as_str())) {
                return Err(row_error(
                    1,
                    format!("asset {dup} appears twice in the header"),
                ));
            }
            for record in rdr.records() {
                let record = record.map_err(csv_error)?;
                let line = line_of(&record);
                let date = parse_date(&record[0], line)?;
                for (asset, cell) in header[1..].iter().zip(record.iter().skip(1)) {
                    if !cell.is_empty() {
                        insert(asset, date, parse_price(cell, line)?, line)?;
                    }
                }
            }
        }
    }

    if order.is_empty() {
        return Err(IngestError::Format("no price observations".into()));
    }
    order
        .into_iter()
        .map(|asset| {
            let obs = observations.remove(&asset).unwrap_or_default();
            let (dates, prices) = obs.into_iter().unzip();
            PriceSeries::new(asset, dates, prices).map_err(IngestError::from)
        })
        .collect()
}

fn to_io(path: &Path) -> impl Fn(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(to_io(path))?;
    f.write_all(text.as_bytes()).map_err(to_io(path))
}

/// Long-layout text, assets in the given order and dates ascending.
pub fn format_prices_long(series: &[PriceSeries]) -> String {
    let mut out = String::from("date,asset_id,price\n");
    for s in series {
        for (d, p) in s.dates().iter().zip(s.prices()) {
            let _ = writeln!(out, "{d},{},{p:?}", s.asset_id());
        }
    }
    out
}

/// Wide-layout text over the union of dates; missing cells stay empty.
pub fn format_prices_wide(series: &[PriceSeries]) -> String {
    let mut out = String::from("date");
    for s in series {
        out.push(',');
        out.push_str(s.asset_id());
    }
    out.push('\n');
    let dates: std::collections::BTreeSet<NaiveDate> = series
        .iter()
        .flat_map(|s| s.dates().iter().copied())
        .collect();
    let mut cursors = vec![0usize; series.len()];
    for d in dates {
        let _ = write!(out, "{d}");
        for (s, c) in series.iter().zip(cursors.iter_mut()) {
            out.push(',');
            if s.dates().get(*c) == Some(&d) {
                let _ = write!(out, "{:?}", s.prices()[*c]);
                *c += 1;
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_prices_long(path: &Path, series: &[PriceSeries]) -> Result<()> {
    write_file(path, &format_prices_long(series))
}

pub fn write_prices_wide(path: &Path, series: &[PriceSeries]) -> Result<()> {
    write_file(path, &format_prices_wide(series))
}

/// Reads `asset_id,market_cap` rows.
pub fn load_universe(path: &Path) -> Result<Vec<UniverseEntry>> {
    let bytes = read(path)?;
    let mut rdr = reader(&bytes);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.iter().collect::<Vec<_>>() != ["asset_id", "market_cap"] {
        return Err(row_error(
            1,
            "universe file needs columns asset_id,market_cap",
        ));
    }
    let mut ids = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = line_of(&record);
        let cap: f64 = record[1]
            .parse()
            .map_err(|_| row_error(line, format!("unparseable market cap {:?}", &record[1])))?;
        if !ids.insert(record[0].to_owned()) {
            return Err(row_error(
                line,
                format!("asset {} listed twice", &record[0]),
            ));
        }
        out.push(UniverseEntry::new(&record[0], cap).map_err(|e| row_error(line, e.to_string()))?);
    }
    Ok(out)
}

/// Shortest round-trip text for `v`.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// The per-date series; unavailable values are empty fields.
pub fn format_series(rows: &[SrrSeriesRow]) -> String {
    let mut out = SERIES_HEADER.join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.date,
            opt(r.nu_raw),
            opt(r.nu_eps),
            opt(r.nu_hat),
            opt(r.sigma_pi_raw),
            opt(r.sigma_pi_hat),
            num(r.kappa_raw),
            num(r.kappa_eps),
            num(r.d_min_raw),
            num(r.d_min_eps),
            opt(r.residual_norm),
        );
    }
    out
}

/// `date,d_1,…,d_N` with the raw singular values of each date.
pub fn format_singular_values(rows: &[SrrSeriesRow]) -> String {
    let n = rows.first().map_or(0, |r| r.singular_values.len());
    let mut out = String::from("date");
    for k in 1..=n {
        let _ = write!(out, ",d_{k}");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{}", r.date);
        for d in &r.singular_values {
            let _ = write!(out, ",{d:?}");
        }
        out.push('\n');
    }
    out
}

pub fn write_series_csv(path: &Path, rows: &[SrrSeriesRow]) -> Result<()> {
    write_file(path, &format_series(rows))
}

pub fn write_singular_values(path: &Path, rows: &[SrrSeriesRow]) -> Result<()> {
    write_file(path, &format_singular_values(rows))
}

/// Numeric values of `column`, skipping empty (not-available) fields.
pub fn read_series_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let bytes = read(path)?;
    let mut rdr = reader(&bytes);
    let idx = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| IngestError::Format(format!("no column named {column}")))?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let cell = record.get(idx).unwrap_or("");
        if cell.is_empty() {
            continue;
        }
        let v: f64 = cell
            .parse()
            .map_err(|_| row_error(line_of(&record), format!("unparseable value {cell:?}")))?;
        out.push(v);
    }
    Ok(out)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    write_file(path, text)
}

/// Raw bytes of `path`, for hashing and parsing from one read.
pub fn load_bytes(path: &Path) -> Result<Vec<u8>> {
    read(path)
}
