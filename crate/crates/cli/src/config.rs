//! Experiment configuration: one JSON file per run, every key overridable by a flag.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use weyl_core::measures::{load_measure, MeasureExpr};
use weyl_core::weyl::TConvMode;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Matrix,
    Scan,
    Verify,
    Density,
    Geometry,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Matrix => "matrix",
            Command::Scan => "scan",
            Command::Verify => "verify",
            Command::Density => "density",
            Command::Geometry => "geometry",
        }
    }
}

/// Smooth bump test function `g(z) = prod exp(-1 / (1 - r_i^2))` on a square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: [f64; 2],
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    /// Measure file, relative to the config file.
    pub measure: Option<PathBuf>,
    pub n: Option<usize>,
    #[serde(rename = "N")]
    pub n_basis: usize,
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    #[serde(rename = "K")]
    pub k: usize,
    /// Gauss-Hermite order for matrix elements; automatic when absent.
    pub quad_order: Option<usize>,
    /// Gauss-Legendre panels (order 8) for curve measures; scales with `N` when absent.
    pub curve_panels: Option<usize>,
    pub tau_dec: f64,
    pub tau_flat: f64,
    pub eps_j: f64,
    pub rank_tol: f64,
    pub out: PathBuf,
    pub seed: u64,
    pub mode: TConvMode,
    pub threads: Option<usize>,
    /// Replaces every verification tolerance when set.
    pub tolerance: Option<f64>,
    /// Cells per axis of density grids.
    pub grid: usize,
    /// Density sweep box `[x0, x1, y0, y1]`.
    pub bounds: [f64; 4],
    pub bumps: Vec<BumpSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            measure: None,
            n: None,
            n_basis: 64,
            n_list: vec![32, 64, 128, 256],
            k: 8,
            quad_order: None,
            curve_panels: None,
            tau_dec: 1e-3,
            tau_flat: 1e-1,
            eps_j: 1e-6,
            rank_tol: 1e-8,
            out: PathBuf::from("out"),
            seed: 0,
            mode: TConvMode::Product,
            threads: None,
            tolerance: None,
            grid: 64,
            bounds: [-2.5, 2.5, -2.5, 2.5],
            bumps: vec![
                BumpSpec { center: [1.0, 0.0], half_width: 0.4 },
                BumpSpec { center: [-0.6, 0.8], half_width: 0.3 },
                BumpSpec { center: [0.3, -1.2], half_width: 0.35 },
            ],
        }
    }
}

/// Flag values; `None` keeps the config file value.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Experiment config (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Measure file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub measure: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Phase-space dimension (1 or 2).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Basis functions per axis.
    #[arg(long = "N", global = true)]
    pub n_basis: Option<usize>,
    /// Comma-separated increasing truncation sizes.
    #[arg(long = "N-list", global = true, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Probe index for scans.
    #[arg(long = "K", global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub quad_order: Option<usize>,
    #[arg(long, global = true)]
    pub curve_panels: Option<usize>,
    #[arg(long, global = true)]
    pub tau_dec: Option<f64>,
    #[arg(long, global = true)]
    pub tau_flat: Option<f64>,
    #[arg(long, global = true)]
    pub eps_j: Option<f64>,
    #[arg(long, global = true)]
    pub rank_tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Worker threads for data-parallel loops.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Replace every verification tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Density sweep box as x0,x1,y0,y1.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub bounds: Option<Vec<f64>>,
    /// Bump test functions as JSON, e.g. '[{"center":[1,0],"half_width":0.4}]'.
    #[arg(long, global = true)]
    pub bumps: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Direct,
    Product,
}

/// A validated config with its measure loaded.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub command: Command,
    pub config: ExperimentConfig,
    pub measure: Option<MeasureExpr>,
    /// Phase-space dimension: from the measure, else `n`, else 1.
    pub n: usize,
    pub config_hash: String,
}

fn schema(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

/// Reads the config (if any), applies flags, loads the measure and validates.
pub fn resolve(command: Command, ov: &Overrides) -> CliResult<Resolved> {
    let (mut cfg, base) = match &ov.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
            let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| schema(path, e))?;
            (cfg, path.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => (ExperimentConfig::default(), PathBuf::new()),
    };
    if let Some(c) = cfg.command {
        if c != command {
            return Err(CliError::Config(format!(
                "config is for command `{}`, invoked as `{}`",
                c.name(),
                command.name()
            )));
        }
    }
    cfg.command = Some(command);
    if let Some(m) = &cfg.measure {
        cfg.measure = Some(base.join(m));
    }
    apply(&mut cfg, ov)?;
    validate(&cfg)?;

    let (measure, measure_text) = match &cfg.measure {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read measure file {}: {e}", path.display())))?;
            let (n, m) = load_measure(path)?;
            if let Some(want) = cfg.n {
                if want != n {
                    return Err(CliError::Config(format!("config n = {want} but measure file has n = {n}")));
                }
            }
            (Some(m), text)
        }
        None => (None, String::new()),
    };
    let n = match &measure {
        Some(m) => m.dim()?,
        None => cfg.n.unwrap_or(1),
    };
    let config_hash = hash(&cfg, &measure_text);
    Ok(Resolved { command, config: cfg, measure, n, config_hash })
}

fn apply(cfg: &mut ExperimentConfig, ov: &Overrides) -> CliResult<()> {
    if let Some(v) = &ov.measure {
        cfg.measure = Some(v.clone());
    }
    if let Some(v) = &ov.out {
        cfg.out = v.clone();
    }
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(v) = ov.$field { cfg.$field = v; } )* };
    }
    set!(n_basis, k, tau_dec, tau_flat, eps_j, rank_tol, seed, grid);
    if ov.n.is_some() {
        cfg.n = ov.n;
    }
    if ov.quad_order.is_some() {
        cfg.quad_order = ov.quad_order;
    }
    if ov.curve_panels.is_some() {
        cfg.curve_panels = ov.curve_panels;
    }
    if ov.threads.is_some() {
        cfg.threads = ov.threads;
    }
    if ov.tolerance.is_some() {
        cfg.tolerance = ov.tolerance;
    }
    if let Some(v) = &ov.n_list {
        cfg.n_list = v.clone();
    }
    if let Some(m) = ov.mode {
        cfg.mode = match m {
            ModeArg::Direct => TConvMode::Direct,
            ModeArg::Product => TConvMode::Product,
        };
    }
    if let Some(b) = &ov.bounds {
        cfg.bounds = b
            .as_slice()
            .try_into()
            .map_err(|_| CliError::Config(format!("--bounds needs 4 values x0,x1,y0,y1, got {}", b.len())))?;
    }
    if let Some(text) = &ov.bumps {
        cfg.bumps = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("--bumps: {e}")))?;
    }
    Ok(())
}

/// Checks the invariants of a config.
pub fn validate(cfg: &ExperimentConfig) -> CliResult<()> {
    let bad = |msg: String| Err(CliError::Config(msg));
    if let Some(n) = cfg.n {
        if !(1..=2).contains(&n) {
            return bad(format!("n must be 1 or 2, got {n}"));
        }
    }
    if cfg.n_basis == 0 {
        return bad("N must be positive".into());
    }
    if cfg.n_list.is_empty() || cfg.n_list[0] == 0 || cfg.n_list.windows(2).any(|w| w[1] <= w[0]) {
        return bad(format!("N_list must be non-empty, positive and strictly increasing, got {:?}", cfg.n_list));
    }
    let min = cfg.n_list[0];
    if cfg.k == 0 || cfg.k >= min {
        return bad(format!("K = {} must satisfy 1 <= K < min(N_list) = {min}", cfg.k));
    }
    for (name, v) in [
        ("tau_dec", cfg.tau_dec),
        ("tau_flat", cfg.tau_flat),
        ("eps_j", cfg.eps_j),
        ("rank_tol", cfg.rank_tol),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return bad(format!("{name} must be positive, got {v}"));
        }
    }
    if let Some(t) = cfg.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return bad(format!("tolerance must be positive, got {t}"));
        }
    }
    if cfg.quad_order == Some(0) || cfg.curve_panels == Some(0) || cfg.threads == Some(0) || cfg.grid == 0 {
        return bad("quad_order, curve_panels, threads and grid must be positive".into());
    }
    let [x0, x1, y0, y1] = cfg.bounds;
    if !(x0 < x1 && y0 < y1) {
        return bad(format!("bounds must satisfy x0 < x1 and y0 < y1, got {:?}", cfg.bounds));
    }
    if cfg.bumps.iter().any(|b| !(b.half_width > 0.0)) {
        return bad("bump half widths must be positive".into());
    }
    Ok(())
}

/// SHA-256 of the canonical config (without `out` and `threads`) and the measure file text.
fn hash(cfg: &ExperimentConfig, measure_text: &str) -> String {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    let map = v.as_object_mut().expect("config is an object");
    for key in ["out", "threads", "measure"] {
        map.remove(key);
    }
    let mut h = Sha256::new();
    h.update(serde_json::to_string(&v).expect("value serializes").as_bytes());
    h.update(b"\n");
    h.update(measure_text.as_bytes());
    hex::encode(h.finalize())
}
