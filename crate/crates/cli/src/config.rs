//! Optional configuration files.
//!
//! A TOML file may set any option of a subcommand, either at the top level
//! or inside a table named after the subcommand (`[train-mlp]`); the table
//! wins over the top level. A JSON run manifest is accepted too, in which
//! case its recorded `config` is reused. Command-line flags override both.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Option table for `subcommand` read from `path`.
pub fn load(path: &Path, subcommand: &str) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| gdv_core::Error::io(path, e))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let root: Value = if is_json {
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
    } else {
        let table: toml::Table = text.parse().map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        serde_json::to_value(table).map_err(|e| CliError::usage(e.to_string()))?
    };
    let Value::Object(mut root) = root else {
        return Err(CliError::usage(format!("{}: expected a table of options", path.display())));
    };
    if is_json {
        let recorded = root.get("subcommand").and_then(Value::as_str).unwrap_or(subcommand);
        if recorded != subcommand {
            return Err(CliError::usage(format!("manifest was recorded for `{recorded}`, not `{subcommand}`")));
        }
        return match root.remove("config") {
            Some(Value::Object(m)) => Ok(m),
            _ => Err(CliError::usage(format!("{}: manifest has no config table", path.display()))),
        };
    }
    let section = match root.remove(subcommand) {
        Some(Value::Object(m)) => m,
        Some(_) => return Err(CliError::usage(format!("`{subcommand}` in the config file must be a table"))),
        None => Map::new(),
    };
    let mut merged: Map<String, Value> = root.into_iter().filter(|(_, v)| !v.is_object()).collect();
    merged.extend(section);
    Ok(merged)
}

/// Overlays the flags that were given on top of `config`.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Map<String, Value>) -> CliResult<T> {
    let Value::Object(given) = serde_json::to_value(flags).map_err(|e| CliError::usage(e.to_string()))? else {
        unreachable!("option structs serialize to objects");
    };
    // Keys shared by several subcommands (e.g. `seed` or `threads`) may sit at
    // the top level of a file; only complain about keys nobody knows.
    let mut base = Map::new();
    for (k, v) in config {
        let key = k.replace('_', "-");
        if given.contains_key(&key) {
            base.insert(key, v);
        } else if !GLOBAL_KEYS.contains(&key.as_str()) {
            return Err(CliError::usage(format!("unknown option `{k}` in config file")));
        }
    }
    for (k, v) in given {
        if !v.is_null() {
            base.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| CliError::usage(format!("invalid option value: {e}")))
}

const GLOBAL_KEYS: &[&str] = &["threads"];

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Default, Serialize, Deserialize, PartialEq)]
    #[serde(default, rename_all = "kebab-case")]
    struct Opts {
        seed: Option<u64>,
        out_dir: Option<String>,
        epochs: Option<usize>,
    }

    #[test]
    fn flags_override_file_and_sections_override_top_level() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "seed = 1\nepochs = 4\n[train-mlp]\nseed = 2\nout-dir = \"x\"\n").unwrap();
        let cfg = load(&path, "train-mlp").unwrap();
        let flags = Opts { epochs: Some(9), ..Default::default() };
        let m = merge(&flags, cfg).unwrap();
        assert_eq!(m, Opts { seed: Some(2), out_dir: Some("x".into()), epochs: Some(9) });
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut cfg = Map::new();
        cfg.insert("bogus".into(), Value::from(1));
        assert!(matches!(merge(&Opts::default(), cfg), Err(CliError::Usage(_))));
        let mut cfg = Map::new();
        cfg.insert("threads".into(), Value::from(2));
        assert!(merge(&Opts::default(), cfg).is_ok());
    }
}
