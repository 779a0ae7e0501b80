use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use gdv_core::io::{self, report::DELTA_SCHEMA, LineSeries};
use gdv_core::synthetic::EnsembleConfig;
use gdv_core::transform::{delta_gdv_experiment, ensemble_gdv_stats, Histogram, TransformKind, TransformSpec};
use serde::{Deserialize, Serialize};

use crate::cmd_fig1::write_text;
use crate::error::{CliError, CliResult};
use crate::run::{parse_list, Command, Run};

pub const ENSEMBLE_SCHEMA: &str = "gdv-ensemble/1";

/// Random cluster ensemble: baseline GDV distribution and GDV changes under
/// random transformations.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct EnsembleArgs {
    /// `all`, `baseline`, or a comma-separated list of transform names
    /// (random_linear, random_linear_logistic, random_linear_double_dim,
    /// random_linear_double_dim_logistic, scale_logistic).
    #[arg(long)]
    pub kind: Option<String>,
    /// Number of ensemble datasets.
    #[arg(long)]
    pub n: Option<usize>,
    /// Seed of the ensemble datasets.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seed of the transformation matrices [default: seed + 1].
    #[arg(long)]
    pub transform_seed: Option<u64>,
    /// Subtract the data mean before transforming.
    #[arg(long)]
    pub center_input: Option<bool>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl EnsembleArgs {
    fn kinds(&self) -> CliResult<(bool, Vec<TransformKind>)> {
        let spec = self.kind.as_deref().unwrap_or("all");
        if spec == "all" {
            return Ok((true, TransformKind::ALL.to_vec()));
        }
        let mut baseline = false;
        let mut kinds = Vec::new();
        for name in parse_list::<String>(spec)? {
            if name == "baseline" {
                baseline = true;
            } else {
                kinds.push(TransformKind::from_name(&name).ok_or_else(|| CliError::usage(format!("unknown transform `{name}`")))?);
            }
        }
        Ok((baseline, kinds))
    }
}

fn histogram_csv(h: &Histogram) -> String {
    let mut s = String::from("bin_center,count\n");
    for (i, c) in h.counts.iter().enumerate() {
        let _ = writeln!(s, "{:.6},{c}", h.bin_center(i));
    }
    s
}

fn histogram_series(name: &str, h: &Histogram) -> LineSeries {
    let total = h.total().max(1) as f64;
    LineSeries {
        name: name.into(),
        points: h.counts.iter().enumerate().map(|(i, &c)| (h.bin_center(i), Some(c as f64 / total))).collect(),
    }
}

impl Command for EnsembleArgs {
    const NAME: &'static str = "ensemble";

    fn fill_defaults(&mut self) {
        let seed = *self.seed.get_or_insert(EnsembleConfig::default().seed);
        self.kind.get_or_insert_with(|| "all".into());
        self.n.get_or_insert(1000);
        self.transform_seed.get_or_insert(seed.wrapping_add(1));
        self.center_input.get_or_insert(true);
        self.out_dir.get_or_insert_with(|| PathBuf::from("ensemble"));
    }

    fn manifest_path(&self) -> Option<PathBuf> {
        self.out_dir.as_ref().map(|d| d.join("manifest.json"))
    }

    fn seeds(&self) -> Vec<u64> {
        self.seed.into_iter().chain(self.transform_seed).collect()
    }

    fn execute(&self, run: &mut Run) -> CliResult<()> {
        let out = self.out_dir.clone().expect("defaults filled");
        let n = self.n.expect("defaults filled");
        let (baseline, kinds) = self.kinds()?;
        let cfg = EnsembleConfig { n_datasets: n, seed: self.seed.expect("defaults filled"), ..EnsembleConfig::default() };
        let mut summary = String::from("experiment,mean,std,n_valid,n_skipped\n");
        let mut series = Vec::new();
        if baseline {
            let stats = ensemble_gdv_stats(&cfg)?;
            io::write_json(run.output(out.join("baseline.json")), ENSEMBLE_SCHEMA, &stats)?;
            write_text(&run.output(out.join("baseline_hist.csv")), &histogram_csv(&stats.histogram))?;
            let _ = writeln!(summary, "baseline,{:.6},{:.6},{},{}", stats.mean, stats.std, stats.n_valid, stats.n_skipped);
            run.log(format!("baseline: mean GDV {:+.4} over {} datasets ({} skipped)", stats.mean, stats.n_valid, stats.n_skipped));
        }
        for kind in kinds {
            let mut spec = TransformSpec::new(kind, self.transform_seed.expect("defaults filled"));
            spec.center_input = self.center_input.expect("defaults filled");
            let stats = delta_gdv_experiment(&cfg, &spec, n)?;
            io::write_json(run.output(out.join(format!("delta_{}.json", kind.name()))), DELTA_SCHEMA, &stats)?;
            write_text(&run.output(out.join(format!("delta_{}_hist.csv", kind.name()))), &histogram_csv(&stats.histogram))?;
            let _ = writeln!(summary, "{},{:.6},{:.6},{},{}", kind.name(), stats.mean_delta, stats.std_delta, stats.n_valid, stats.n_skipped);
            series.push(histogram_series(kind.name(), &stats.histogram));
            run.log(format!("{}: mean change {:+.4} (sd {:.4})", kind.name(), stats.mean_delta, stats.std_delta));
        }
        write_text(&run.output(out.join("summary.csv")), &summary)?;
        if !series.is_empty() {
            io::write_svg_lines(run.output(out.join("delta_hist.svg")), &series, "GDV change under random transforms", "change in GDV", "fraction")?;
        }
        Ok(())
    }
}
