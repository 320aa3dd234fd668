use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("chart is rank deficient at quadrature node {index} (parameter {param:?})")]
    RankDeficient { index: usize, param: Vec<f64> },

    #[error("jet of order {requested} requested, chart supplies at most order {available}")]
    JetOrder { requested: usize, available: usize },

    #[error(
        "Gauss-Hermite order {order} not converged for (x, y) = ({x}, {y}): \
         probe entries moved by {change:e} against a higher order; raise quad_order"
    )]
    QuadratureNotConverged { order: usize, x: f64, y: f64, change: f64 },

    #[error("direct twisted-convolution quadrature needs {required} node tuples, budget is {budget}; use product mode")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("nested twisted convolution in direct mode; flatten the children (twisted convolution is associative)")]
    NestedTConv,

    #[error("near-critical fiber point at (s, t) = ({s}, {t}): |det| = {jacobian:e} below exclusion threshold {threshold:e}")]
    NearCritical { s: f64, t: f64, jacobian: f64, threshold: f64 },

    #[error("unknown curve `{name}`; catalog: {catalog}")]
    UnknownCurve { name: String, catalog: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("singular value decomposition failed")]
    Svd,
}

pub type Result<T> = std::result::Result<T, Error>;
