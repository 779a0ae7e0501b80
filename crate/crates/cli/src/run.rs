use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config;
use crate::error::{CliError, CliResult};
use crate::manifest::{RunError, RunManifest};

/// Output bookkeeping for one invocation.
pub struct Run {
    pub manifest: RunManifest,
}

impl Run {
    /// Registers `path` as an output and returns it.
    pub fn output(&mut self, path: impl Into<PathBuf>) -> PathBuf {
        let path = path.into();
        self.manifest.outputs.push(path.clone());
        path
    }

    pub fn log(&self, msg: impl AsRef<str>) {
        eprintln!("[{}] {}", self.manifest.subcommand, msg.as_ref());
    }
}

pub trait Command: Serialize + DeserializeOwned + Default {
    const NAME: &'static str;
    /// Replaces every unset option by its default.
    fn fill_defaults(&mut self);
    /// Where the run manifest goes, if the options say enough to decide.
    fn manifest_path(&self) -> Option<PathBuf>;
    fn seeds(&self) -> Vec<u64>;
    fn execute(&self, run: &mut Run) -> CliResult<()>;
}

pub struct Global {
    pub config: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub threads: usize,
}

const FALLBACK_MANIFEST: &str = "gdv-run-manifest.json";

/// Resolves options, runs the command and always writes a manifest.
/// Returns the process exit code.
pub fn drive<C: Command>(flags: C, global: &Global) -> i32 {
    let start = Instant::now();
    let mut run = Run { manifest: RunManifest::new(C::NAME, global.threads) };
    let fallback_path = flags.manifest_path();
    let resolved = resolve(flags, global.config.as_deref());
    let manifest_path = global
        .manifest
        .clone()
        .or_else(|| resolved.as_ref().ok().and_then(|c| c.manifest_path()))
        .or(fallback_path)
        .unwrap_or_else(|| PathBuf::from(FALLBACK_MANIFEST));

    let outcome = resolved.and_then(|cmd| {
        run.manifest.config = serde_json::to_value(&cmd).expect("options serialize");
        run.manifest.seeds = cmd.seeds();
        cmd.execute(&mut run)
    });
    let error = outcome.as_ref().err().map(|e| RunError {
        name: e.name().to_string(),
        message: e.to_string(),
        exit_code: e.exit_code(),
    });
    run.manifest.finish(start.elapsed(), error);
    let mut code = 0;
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
        code = e.exit_code();
    }
    if let Err(e) = run.manifest.write(&manifest_path) {
        eprintln!("error: could not write run manifest: {e}");
        if code == 0 {
            code = 1;
        }
    }
    code
}

fn resolve<C: Command>(flags: C, config_path: Option<&Path>) -> CliResult<C> {
    let mut cmd = match config_path {
        Some(p) => config::merge(&flags, config::load(p, C::NAME)?)?,
        None => flags,
    };
    cmd.fill_defaults();
    Ok(cmd)
}

/// Parses `"64,64,32"` or the shorthand `"64x8"` (eight layers of 64).
pub fn parse_widths(spec: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::usage(format!("cannot read layer widths from `{spec}`"));
    let spec = spec.trim();
    if let Some((w, n)) = spec.split_once(['x', '*']) {
        let w: usize = w.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        return Ok(vec![w; n]);
    }
    parse_list(spec).map_err(|_| bad())
}

pub fn parse_list<T: std::str::FromStr>(spec: &str) -> CliResult<Vec<T>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| CliError::usage(format!("cannot read `{s}` in list `{spec}`"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_specs() {
        assert_eq!(parse_widths("64x3").unwrap(), vec![64, 64, 64]);
        assert_eq!(parse_widths("256, 246,236").unwrap(), vec![256, 246, 236]);
        assert!(parse_widths("a,b").is_err());
        assert_eq!(parse_list::<u32>("0,1,6").unwrap(), vec![0, 1, 6]);
    }
}
