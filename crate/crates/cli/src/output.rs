//! Output files. Every file starts with a header naming the tool versions and the config hash.

use std::path::{Path, PathBuf};

use serde::Serialize;
use weyl_core::hermite::ORDERING_VERSION;

use crate::config::Resolved;
use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub cli_version: &'static str,
    pub core_version: &'static str,
    pub ordering: &'static str,
    pub command: &'static str,
    pub config_hash: String,
}

impl Header {
    pub fn new(r: &Resolved) -> Self {
        Self {
            tool: "weyl",
            cli_version: env!("CARGO_PKG_VERSION"),
            core_version: weyl_core::VERSION,
            ordering: ORDERING_VERSION,
            command: r.command.name(),
            config_hash: r.config_hash.clone(),
        }
    }

    /// `# key=value` lines for CSV files.
    pub fn csv_lines(&self) -> Vec<String> {
        vec![
            format!("{} cli={} core={} ordering={}", self.tool, self.cli_version, self.core_version, self.ordering),
            format!("command={} config_hash={}", self.command, self.config_hash),
        ]
    }

    pub fn csv_block(&self) -> String {
        self.csv_lines().iter().map(|l| format!("# {l}\n")).collect()
    }
}

/// A JSON document `{"header": .., <body fields>}`.
#[derive(Serialize)]
pub struct Document<'a, T: Serialize> {
    pub header: &'a Header,
    #[serde(flatten)]
    pub body: &'a T,
}

pub fn json<T: Serialize>(header: &Header, body: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Document { header, body }).expect("report serializes");
    s.push('\n');
    s
}

/// Writes `text` to `dir/name`, creating `dir`.
pub fn write(dir: &Path, name: &str, text: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, text)?;
    Ok(path)
}
