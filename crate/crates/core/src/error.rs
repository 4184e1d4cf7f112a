use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    Invalid(#[from] ValidationReport),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("assignment has no target owners")]
    MissingOwners,

    #[error("order is not a permutation of the robots: {0}")]
    BadOrder(String),

    #[error("enumeration cap exceeded: {count} assignments > cap {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("lp has {count} primitives, cap is {cap}")]
    LpCap { count: usize, cap: usize },

    #[error("target {0} has no positive-weight primitive in the lp")]
    UncoveredTarget(usize),

    #[error("weights span a dynamic range of {0:e}, which is numerically degenerate")]
    Degenerate(f64),

    #[error("lp is infeasible")]
    Infeasible,

    #[error("lp is unbounded")]
    Unbounded,

    #[error("simplex did not converge within {0} pivots")]
    PivotLimit(usize),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("phi {requested}% is not achievable: {reason}")]
    UnachievablePhi { requested: f64, reason: String },

    #[error("network simulation: {0}")]
    Net(String),

    #[error("max rounds ({0}) reached before all nodes halted")]
    MaxRounds(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
