//! Crate-wide error type.

use std::path::PathBuf;

use crate::series::PeriodIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("non-numeric cell at row {row}, column `{column}`: {value:?}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("gap in periods: expected {expected}, found {found}")]
    GapInPeriods {
        expected: PeriodIndex,
        found: PeriodIndex,
    },

    #[error("invalid period literal {0:?} (expected YYYYQn)")]
    InvalidPeriod(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("series are not aligned: {0}")]
    MisalignedSeries(String),

    #[error("non-positive denominator in `{series}` at {period}")]
    NonPositiveDenominator { series: String, period: PeriodIndex },

    #[error("division by zero computing `{quantity}` at {period}")]
    DivisionByZero {
        quantity: String,
        period: PeriodIndex,
    },

    #[error("series too short: need at least {required} observations, have {actual}")]
    SeriesTooShort { required: usize, actual: usize },

    #[error("non-positive value in `{series}` at {period}")]
    NonPositiveValue { series: String, period: PeriodIndex },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("zero variance in regression input")]
    ZeroVariance,

    #[error("integration order undetermined up to order {max_order}")]
    OrderUndetermined { max_order: usize },

    #[error("regressor matrix is rank deficient")]
    RankDeficientRegressors,

    #[error("singular moment matrix: {0}")]
    SingularMomentMatrix(String),

    #[error("eigenvalue {value} outside [0, 1)")]
    EigenvalueOutOfRange { value: f64 },

    #[error("cointegration rank is zero")]
    RankZero,

    #[error("target coefficient is numerically zero")]
    ZeroPivot,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("eigenvalue computation failed")]
    EigenFailure,

    #[error("residual covariance is not positive definite")]
    NonPositiveDefiniteCovariance,

    #[error("config error: {0}")]
    Config(String),

    #[error("stage `{stage}`: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, looking through stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for failures of the numerical engine, as opposed to bad data or
    /// configuration.
    pub fn is_numerical(&self) -> bool {
        if let Error::Stage { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::ZeroVariance
                | Error::OrderUndetermined { .. }
                | Error::RankDeficientRegressors
                | Error::SingularMomentMatrix(_)
                | Error::EigenvalueOutOfRange { .. }
                | Error::RankZero
                | Error::ZeroPivot
                | Error::EigenFailure
                | Error::NonPositiveDefiniteCovariance
        )
    }
}
