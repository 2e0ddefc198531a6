use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown step-distribution family `{0}`")]
    UnknownFamily(String),
    #[error("dimension must be at least 1 (got {0})")]
    InvalidDimension(usize),
    #[error("point {point:?} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        point: alloc::vec::Vec<i32>,
        found: usize,
        expected: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("step distribution support is empty (cutoff radius {radius})")]
    EmptySupport { radius: f64 },
    #[error("step table is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("step table has a weight at the origin")]
    OriginWeight,
    #[error("step table weight is negative or not finite at {0:?}")]
    InvalidWeight(alloc::vec::Vec<i32>),
    #[error("cannot parse `{0}` as a number")]
    InvalidNumber(String),
    #[error("exact arithmetic requested but the step distribution has no exact weights")]
    NotExact,
    #[error("smoothness constant must lie in (0, 1], got {0}")]
    InvalidDelta(f64),
    #[error("enumeration needs about {projected:.3e} node expansions, budget is {budget}")]
    BudgetExceeded { projected: f64, budget: u64 },
    #[error("graph on [{a}, {b}] is not connected")]
    NotConnected { a: usize, b: usize },
    #[error("edge ({0}, {1}) belongs to the lace; compatibility applies to absent edges")]
    EdgeInLace(usize, usize),
    #[error("edge ({s}, {t}) is not inside [{a}, {b}]")]
    EdgeOutOfRange { s: usize, t: usize, a: usize, b: usize },
    #[error("prefix walk has zero weight; the inequality is vacuous")]
    ZeroWeightPrefix,
    #[error("graph-sum check limited to n <= {max} (got {n})")]
    TooManyGraphs { n: usize, max: usize },
    #[error("1 + sigma = {0:e} is too close to zero")]
    DegenerateSigma(f64),
    #[error("missing input: {0}")]
    MissingInput(String),
}
