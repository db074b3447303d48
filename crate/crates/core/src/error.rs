use alloc::string::String;

use chrono::NaiveDate;

/// Errors raised by the estimation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("fewer than 2 common dates")]
    FewCommonDates,

    #[error("date gap: asset {asset} has no price on {date}")]
    DateGap { asset: String, date: NaiveDate },

    #[error("insufficient history: need {required} rows, have {available}")]
    InsufficientHistory { required: usize, available: usize },

    #[error("cannot select {requested} assets from a universe of {available}")]
    SelectionTooLarge { requested: usize, available: usize },

    #[error("negative eigenvalue {value} at index {index}")]
    NegativeEigenvalue { index: usize, value: f64 },

    #[error("singular regressors: principal component {column} has zero variance")]
    SingularRegressors { column: usize },

    #[error("singular matrix: pivot {pivot} below floor")]
    SingularMatrix { pivot: usize },

    #[error("smallest singular value {smallest} below floor relative to {largest}")]
    SingularValueFloor { smallest: f64, largest: f64 },

    #[error("equal volatilities: the two-asset market is incomplete")]
    EqualVolatilities,

    #[error("zero determinant")]
    ZeroDeterminant,

    #[error("composite {index} has zero variance")]
    ZeroVariance { index: usize },

    #[error("empty series")]
    EmptySeries,

    #[error("solver did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
