//! Hermite functions, basis truncations and matrix elements of the representation.

mod basis;
mod functions;
mod rho;

pub use basis::{frobenius, BasisTruncation, OperatorMatrix, MAX_DIM, ORDERING_VERSION};
pub use functions::{
    hermite_fn, hermite_fn_bounded, hermite_functions, hermite_functions_into, ln_factorials, GaussHermite,
    DEFAULT_MAX_INDEX,
};
pub use rho::{rho_matrix, rho_matrix_1d, HermiteConfig, RhoBackend, RhoEvaluator};
