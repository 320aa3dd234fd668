//! Truncated Weyl transforms of measures on phase space R^{2n}.
//!
//! Operators are represented by their matrices in the first `N` Hermite
//! functions per coordinate. See [`weyl::weyl_matrix`] for the entry point.

pub mod error;
pub mod geometry;
pub mod hermite;
pub mod measures;
pub mod parallel;
pub mod phase_space;
pub mod quadrature;
pub mod tconv;
pub mod weyl;

pub use error::{Error, Result};
pub use hermite::{BasisTruncation, HermiteConfig, OperatorMatrix};
pub use parallel::Execution;
pub use phase_space::{HeisenbergElement, PhasePoint};

/// Crate version recorded in output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
