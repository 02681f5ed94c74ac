use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::Result;

/// One line of an experiment's CSV output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub kind: String,
    pub n: usize,
    pub q_or_p: String,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub quantity: String,
    pub value: f64,
    pub uncertainty: Option<f64>,
    pub seed: u64,
    pub walltime_s: f64,
}

impl ResultRow {
    pub const HEADER: &'static str = "kind,n,q_or_p,T,quantity,value,uncertainty,seed,walltime_s";

    pub fn to_csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{:e},{},{},{:.3}",
            self.kind,
            self.n,
            self.q_or_p,
            opt(self.horizon),
            self.quantity,
            self.value,
            opt(self.uncertainty),
            self.seed,
            self.walltime_s
        )
    }
}

/// CSV document: the config and its hash as `#` comments, then the rows.
pub fn render_csv(config: &ExperimentConfig, rows: &[ResultRow]) -> String {
    let mut out = String::new();
    writeln!(out, "# config: {}", config.to_json()).unwrap();
    writeln!(out, "# config_hash: {:016x}", config.hash()).unwrap();
    writeln!(out, "{}", ResultRow::HEADER).unwrap();
    for r in rows {
        writeln!(out, "{}", r.to_csv()).unwrap();
    }
    out
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
