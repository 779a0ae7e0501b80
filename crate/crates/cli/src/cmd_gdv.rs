use std::path::PathBuf;

use clap::Args;
use gdv_core::io::{self, read_activation_archive, write_curve_csv, write_json, write_report_json, LineSeries};
use gdv_core::projection::mds_project;
use gdv_core::{gdv, gdv_curve};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::run::{Command, Run};

/// GDV of a labeled CSV file, or the GDV curve of an activation archive.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct GdvArgs {
    /// Labeled CSV (`.csv`) or activation archive (`.gdva`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// JSON report to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Curve CSV for archive input [default: output with a .csv extension].
    #[arg(long)]
    pub curve_csv: Option<PathBuf>,
    /// Also draw an SVG: an MDS scatter for CSV input, the curve for archives.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

impl Command for GdvArgs {
    const NAME: &'static str = "gdv";

    fn fill_defaults(&mut self) {
        if self.curve_csv.is_none() && self.input.as_ref().is_some_and(|p| is_archive(p)) {
            self.curve_csv = self.output.as_ref().map(|o| o.with_extension("csv"));
        }
    }

    fn manifest_path(&self) -> Option<PathBuf> {
        self.output.as_ref().map(|o| o.with_extension("manifest.json"))
    }

    fn seeds(&self) -> Vec<u64> {
        Vec::new()
    }

    fn execute(&self, run: &mut Run) -> CliResult<()> {
        let input = self.input.as_ref().ok_or_else(|| CliError::usage("--input is required"))?;
        let output = self.output.as_ref().ok_or_else(|| CliError::usage("--output is required"))?;
        if is_archive(input) {
            let archive = read_activation_archive(input)?;
            let curve = gdv_curve(&archive.to_datasets()?)?;
            write_json(run.output(output), io::report::CURVE_SCHEMA, &curve)?;
            if let Some(csv) = &self.curve_csv {
                write_curve_csv(run.output(csv), &curve)?;
            }
            if let Some(svg) = &self.svg {
                let series = LineSeries {
                    name: "GDV".into(),
                    points: curve.points.iter().map(|p| (p.layer_index as f64, p.gdv)).collect(),
                };
                io::write_svg_lines(run.output(svg), &[series], "GDV per layer", "layer", "GDV")?;
            }
            run.log(format!("{} layers", curve.len()));
        } else {
            let data = io::load_labeled_csv(input)?;
            let report = gdv(&data)?;
            write_report_json(run.output(output), &report)?;
            if let Some(svg) = &self.svg {
                let proj = mds_project(&data)?;
                io::write_svg_scatter(run.output(svg), &proj, &proj.labels, &format!("GDV = {:.3}", report.gdv))?;
            }
            run.log(format!("GDV = {:.6}", report.gdv));
        }
        Ok(())
    }
}

fn is_archive(p: &std::path::Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("gdva"))
}
