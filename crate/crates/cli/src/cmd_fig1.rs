use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use gdv_core::io::{self, LineSeries};
use gdv_core::projection::mds_project;
use gdv_core::synthetic::{embed_duplicate_y, embed_full_duplicate, embed_replicate, generate_clusters, ClusterSpec};
use gdv_core::{gdv, LabeledDataset};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::run::{Command, Run};

pub const FIG1_SCHEMA: &str = "gdv-fig1/1";
const SWEEP_DIMS: std::ops::RangeInclusive<usize> = 3..=20;

/// Two-cluster demonstrations: separated and overlapping pairs, their
/// embeddings into more dimensions, and the dimension sweep.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct Fig1Args {
    /// First dataset seed; seeds `seed..seed + n_seeds` are averaged.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_seeds: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseValues {
    pub case: String,
    pub description: String,
    pub dims: usize,
    pub gdv: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fig1Report {
    pub seeds: Vec<u64>,
    pub cases: Vec<CaseValues>,
    /// Mean GDV per embedding dimension for the separated and overlapping pairs.
    pub sweep_dims: Vec<usize>,
    pub sweep_separated: Vec<f64>,
    pub sweep_overlapping: Vec<f64>,
}

fn summarize(case: &str, description: &str, dims: usize, gdv: Vec<f64>) -> CaseValues {
    let n = gdv.len() as f64;
    let mean = gdv.iter().sum::<f64>() / n;
    let std = (gdv.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / n).sqrt();
    CaseValues { case: case.into(), description: description.into(), dims, gdv, mean, std }
}

impl Command for Fig1Args {
    const NAME: &'static str = "fig1";

    fn fill_defaults(&mut self) {
        self.seed.get_or_insert(1);
        self.n_seeds.get_or_insert(20);
        self.out_dir.get_or_insert_with(|| PathBuf::from("fig1"));
    }

    fn manifest_path(&self) -> Option<PathBuf> {
        self.out_dir.as_ref().map(|d| d.join("manifest.json"))
    }

    fn seeds(&self) -> Vec<u64> {
        let s = self.seed.unwrap_or_default();
        (s..s + self.n_seeds.unwrap_or_default() as u64).collect()
    }

    fn execute(&self, run: &mut Run) -> CliResult<()> {
        let out = self.out_dir.clone().expect("defaults filled");
        if self.n_seeds == Some(0) {
            return Err(CliError::usage("--n-seeds must be at least 1"));
        }
        let seeds = self.seeds();
        let gen = |make: fn(u64) -> ClusterSpec| -> CliResult<Vec<LabeledDataset>> {
            seeds.iter().map(|&s| Ok(generate_clusters(&make(s))?)).collect()
        };
        let separated = gen(ClusterSpec::separated)?;
        let overlapping = gen(ClusterSpec::overlapping)?;
        let over = |sets: &[LabeledDataset], f: &dyn Fn(&LabeledDataset) -> gdv_core::Result<LabeledDataset>| -> CliResult<Vec<f64>> {
            sets.iter().map(|d| Ok(gdv(&f(d)?)?.gdv)).collect()
        };
        let ident = |d: &LabeledDataset| Ok(d.clone());

        let cases = vec![
            summarize("a", "separated clusters, 2-D", 2, over(&separated, &ident)?),
            summarize("b", "separated clusters embedded as (x, y, y)", 3, over(&separated, &embed_duplicate_y)?),
            summarize("c", "overlapping clusters, 2-D", 2, over(&overlapping, &ident)?),
            summarize("d", "overlapping clusters embedded as (x, y, y)", 3, over(&overlapping, &embed_duplicate_y)?),
            summarize("e", "separated clusters duplicated as (x, y, x, y)", 4, over(&separated, &embed_full_duplicate)?),
        ];
        let sweep = |sets: &[LabeledDataset]| -> CliResult<Vec<f64>> {
            SWEEP_DIMS
                .map(|d| {
                    let v = over(sets, &|x| embed_replicate(x, d))?;
                    Ok(v.iter().sum::<f64>() / v.len() as f64)
                })
                .collect()
        };
        let report = Fig1Report {
            seeds: seeds.clone(),
            cases,
            sweep_dims: SWEEP_DIMS.collect(),
            sweep_separated: sweep(&separated)?,
            sweep_overlapping: sweep(&overlapping)?,
        };

        let mut table = String::from("case,description,dims,mean_gdv,std_gdv,n_seeds\n");
        for c in &report.cases {
            let _ = writeln!(table, "{},\"{}\",{},{:.6},{:.6},{}", c.case, c.description, c.dims, c.mean, c.std, c.gdv.len());
        }
        for (i, &d) in report.sweep_dims.iter().enumerate() {
            let _ = writeln!(table, "f,\"separated clusters replicated to {d} dims\",{d},{:.6},,{}", report.sweep_separated[i], seeds.len());
            let _ = writeln!(table, "f,\"overlapping clusters replicated to {d} dims\",{d},{:.6},,{}", report.sweep_overlapping[i], seeds.len());
        }
        let table_path = run.output(out.join("fig1_values.csv"));
        write_text(&table_path, &table)?;
        io::write_json(run.output(out.join("fig1.json")), FIG1_SCHEMA, &report)?;

        io::save_labeled_csv(run.output(out.join("fig1a.csv")), &separated[0])?;
        io::save_labeled_csv(run.output(out.join("fig1c.csv")), &overlapping[0])?;
        let scatters: [(&str, &LabeledDataset, bool); 4] = [
            ("fig1a.svg", &separated[0], false),
            ("fig1b.svg", &separated[0], true),
            ("fig1c.svg", &overlapping[0], false),
            ("fig1d.svg", &overlapping[0], true),
        ];
        for (name, data, embed) in scatters {
            let data = if embed { embed_duplicate_y(data)? } else { data.clone() };
            let g = gdv(&data)?.gdv;
            let proj = mds_project(&data)?;
            io::write_svg_scatter(run.output(out.join(name)), &proj, &proj.labels, &format!("{} dims, GDV = {g:.3}", data.n_dims()))?;
            io::save_projection_csv(run.output(out.join(name.replace(".svg", "_mds.csv"))), &proj)?;
        }
        let series = |name: &str, v: &[f64]| LineSeries {
            name: name.into(),
            points: report.sweep_dims.iter().zip(v).map(|(&d, &g)| (d as f64, Some(g))).collect(),
        };
        io::write_svg_lines(
            run.output(out.join("fig1f.svg")),
            &[series("separated", &report.sweep_separated), series("overlapping", &report.sweep_overlapping)],
            "GDV under coordinate replication",
            "dimensions",
            "GDV",
        )?;
        for c in &report.cases {
            run.log(format!("case {}: mean GDV {:+.4} (sd {:.4}) {}", c.case, c.mean, c.std, c.description));
        }
        Ok(())
    }
}

pub fn write_text(path: &std::path::Path, text: &str) -> CliResult<()> {
    use std::io::Write;
    let mut f = io::create(path)?;
    f.write_all(text.as_bytes()).and_then(|_| f.flush()).map_err(|e| gdv_core::Error::io(path, e))?;
    Ok(())
}
