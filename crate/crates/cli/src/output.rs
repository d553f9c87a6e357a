use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::CliError;

/// Floats in CSV output carry 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Output directory whose files are replaced atomically.
#[derive(Debug, Clone)]
pub struct Output {
    dir: PathBuf,
    quiet: bool,
}

impl Output {
    pub fn new(dir: PathBuf, quiet: bool) -> Result<Self, CliError> {
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Output { dir, quiet })
    }

    pub fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    pub fn write_bytes(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        let parent = path.parent().unwrap_or(&self.dir).to_path_buf();
        fs::create_dir_all(&parent).map_err(|e| CliError::io(&parent, e))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&parent).map_err(|e| CliError::io(&parent, e))?;
        tmp.write_all(bytes).map_err(|e| CliError::io(&path, e))?;
        tmp.persist(&path).map_err(|e| CliError::io(&path, e.error))?;
        Ok(path)
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        self.write_bytes(name, &bytes)
    }
}

/// Outcome of one check, tied to the claim it exercises.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub op: String,
    pub claim: String,
    pub inputs_digest: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub fit: Option<f64>,
    pub tolerance: f64,
    pub holds: bool,
}

pub const VERDICT_HEADER: [&str; 8] = ["op", "claim", "inputs_digest", "lhs", "rhs", "fit", "tolerance", "holds"];

impl Verdict {
    pub fn row(&self) -> Vec<String> {
        vec![
            self.op.clone(),
            self.claim.clone(),
            self.inputs_digest.clone(),
            opt_num(self.lhs),
            opt_num(self.rhs),
            opt_num(self.fit),
            num(self.tolerance),
            self.holds.to_string(),
        ]
    }
}
