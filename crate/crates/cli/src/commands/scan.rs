use weyl_core::weyl::{compactness_scan, ScanThresholds};

use super::{require_measure, weyl_config, Outcome};
use crate::config::Resolved;
use crate::error::CliResult;
use crate::output::{json, write, Header};

/// Singular-value scan over `N_list`: `scan.csv` with probe rows and `scan.json` with spectra and trend.
pub fn cmd_scan(r: &Resolved) -> CliResult<Outcome> {
    let m = require_measure(r)?;
    let c = &r.config;
    let th = ScanThresholds { tau_dec: c.tau_dec, tau_flat: c.tau_flat };
    let report = compactness_scan(m, &c.n_list, c.k, th, &weyl_config(r))?;
    let header = Header::new(r);
    let csv = write(&c.out, "scan.csv", &format!("{}{}", header.csv_block(), report.to_csv()))?;
    let js = write(&c.out, "scan.json", &json(&header, &report))?;
    let mut lines: Vec<String> = report
        .n_list
        .iter()
        .zip(&report.mid_ratios)
        .map(|(n, ratio)| format!("N={n}: sigma_mid/sigma_1 = {ratio:.6e}"))
        .collect();
    lines.push(format!("trend: {}", serde_json::to_value(report.trend).expect("trend serializes").as_str().unwrap_or("")));
    Ok(Outcome { passed: true, files: vec![csv, js], lines })
}
