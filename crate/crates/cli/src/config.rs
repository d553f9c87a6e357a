use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Parameters of the subcommand, with the same names as its flags.
    #[serde(default)]
    pub params: Option<Value>,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }
}

/// Overlays the flags that were given onto the config record.
///
/// Flags that were not given serialize as `null`, or `false` for switches,
/// and leave the config value in place.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Value>) -> Result<T, CliError> {
    let mut base = config.cloned().unwrap_or_else(|| Value::Object(Default::default()));
    if !base.is_object() {
        return Err(CliError::usage("config `params` must be an object"));
    }
    overlay(&mut base, serde_json::to_value(flags)?);
    serde_json::from_value(base).map_err(|e| CliError::usage(format!("config params: {e}")))
}

fn overlay(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match v {
                    Value::Null | Value::Bool(false) => {}
                    Value::Object(_) => overlay(b.entry(k).or_insert_with(|| Value::Object(Default::default())), v),
                    v => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) => *b = t,
    }
}

/// Parses `a:b` with `a < b`.
pub fn parse_window(text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::usage(format!("window '{text}' is not of the form a:b with a < b"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if a < b && a.is_finite() && b.is_finite() {
        Ok((a, b))
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{CodimArgs, FlowArgs};

    #[test]
    fn flags_override_config() {
        let config = serde_json::json!({"torus": [1, 3], "t": -2.0, "threshold": 1e-3});
        let flags = CodimArgs {
            t: Some(-1.0),
            ..Default::default()
        };
        let merged = merge(&flags, Some(&config)).unwrap();
        assert_eq!(merged.torus, Some(vec![1, 3]));
        assert_eq!(merged.t, Some(-1.0));
        assert_eq!(merged.threshold, Some(1e-3));
    }

    #[test]
    fn nested_source_merges() {
        let config = serde_json::json!({"source": {"torus": [1, 2]}, "t0": -1.0});
        let mut flags = FlowArgs::default();
        flags.source.circle_mult = Some(2);
        let merged = merge(&flags, Some(&config)).unwrap();
        assert_eq!(merged.source.torus, Some(vec![1, 2]));
        assert_eq!(merged.source.circle_mult, Some(2));
    }

    #[test]
    fn unknown_keys_rejected() {
        let config = serde_json::json!({"tt": -1.0});
        assert!(matches!(merge(&CodimArgs::default(), Some(&config)), Err(CliError::Usage(_))));
        let config = serde_json::json!({"source": {"tours": [1]}});
        assert!(merge(&FlowArgs::default(), Some(&config)).is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(parse_window("-1e8:-1e4").unwrap(), (-1e8, -1e4));
        assert!(parse_window("-1:-2").is_err());
        assert!(parse_window("3").is_err());
    }
}
