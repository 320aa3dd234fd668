use weyl_core::weyl::{weyl_matrix, TConvMode};
use weyl_core::BasisTruncation;

use super::{require_measure, weyl_config, Outcome};
use crate::config::Resolved;
use crate::error::CliResult;
use crate::output::{write, Header};

/// `W_N(measure)` as `matrix.csv`.
pub fn cmd_matrix(r: &Resolved) -> CliResult<Outcome> {
    let m = require_measure(r)?;
    let trunc = BasisTruncation::new(r.n, r.config.n_basis)?;
    let w = weyl_matrix(m, &trunc, &weyl_config(r))?;
    let mut header = Header::new(r).csv_lines();
    let mode = match r.config.mode {
        TConvMode::Direct => "direct",
        TConvMode::Product => "product",
    };
    header.push(format!("mode={mode}"));
    let path = write(&r.config.out, "matrix.csv", &w.to_csv(&header))?;
    Ok(Outcome {
        passed: true,
        lines: vec![format!("matrix n={} N={} dim={} -> {}", r.n, r.config.n_basis, w.dim(), path.display())],
        files: vec![path],
    })
}
