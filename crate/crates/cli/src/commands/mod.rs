//! The five commands. Each returns an [`Outcome`]; files are written single-threaded.

mod density;
mod geometry;
mod matrix;
mod scan;
mod verify;

use std::path::PathBuf;

use serde_json::json;
use weyl_core::measures::{curve_catalog, Density, MeasureExpr, SmoothMeasureSpec};
use weyl_core::quadrature::CompositeRule;
use weyl_core::weyl::WeylConfig;
use weyl_core::HermiteConfig;

pub use density::{cmd_density, BumpPairing, DensitySummary};
pub use geometry::{cmd_geometry, CurveGeometry, GeometryReport};
pub use matrix::cmd_matrix;
pub use scan::cmd_scan;
pub use verify::{cmd_verify, verify_report, SuiteResult, VerifyReport};

use crate::config::{Command, Resolved};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// False when a verification failed; maps to exit code 1.
    pub passed: bool,
    pub files: Vec<PathBuf>,
    /// Human-readable summary for stdout.
    pub lines: Vec<String>,
}

/// Runs the resolved command, inside a thread pool of `threads` workers when set.
pub fn run(r: &Resolved) -> CliResult<Outcome> {
    #[cfg(feature = "parallel")]
    if let Some(t) = r.config.threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
        return pool.install(|| dispatch(r));
    }
    dispatch(r)
}

fn dispatch(r: &Resolved) -> CliResult<Outcome> {
    match r.command {
        Command::Matrix => cmd_matrix(r),
        Command::Scan => cmd_scan(r),
        Command::Verify => cmd_verify(r),
        Command::Density => cmd_density(r),
        Command::Geometry => cmd_geometry(r),
    }
}

pub(crate) fn weyl_config(r: &Resolved) -> WeylConfig {
    let c = &r.config;
    WeylConfig {
        hermite: HermiteConfig { quad_order: c.quad_order, ..HermiteConfig::default() },
        curve_rule: c.curve_panels.map(|p| CompositeRule::new(p, CompositeRule::CURVE.order)),
        tconv_mode: c.mode,
        ..WeylConfig::default()
    }
}

pub(crate) fn require_measure(r: &Resolved) -> CliResult<&MeasureExpr> {
    r.measure
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("command `{}` needs a measure file (`measure` key or --measure)", r.command.name())))
}

/// Catalog shape with fixed demonstration parameters.
pub fn catalog_params(name: &str) -> serde_json::Value {
    match name {
        "ellipse" => json!({"a": 1.5, "b": 0.75}),
        "line_segment" => json!({"a": [-1.0, 0.0], "b": [1.0, 0.0]}),
        "polynomial_curve" => json!({"coeffs": [[0.0, 1.0, 0.5], [0.2, 0.0, -1.0, 0.3]], "t0": -1.0, "t1": 1.0}),
        _ => json!({}),
    }
}

/// Catalog shape with unit density.
pub fn catalog_measure(name: &str) -> CliResult<MeasureExpr> {
    let chart = curve_catalog(name, &catalog_params(name))?;
    Ok(MeasureExpr::smooth(SmoothMeasureSpec::new(chart, Density::default())?))
}
