use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use gdv_core::io::{self, report::CURVE_SCHEMA, LineSeries};
use gdv_core::projection::mds_project;
use gdv_core::{gdv_curve, GdvCurve, LabeledDataset};
use gdv_nets::checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
use gdv_nets::dream::correlation;
use gdv_nets::{
    dbn_train_greedy, mlp_accuracy, mlp_layer_activations, mlp_train, prototype_reconstruct, Activation, DbnModel,
    DbnTrainConfig, MlpConfig, MlpModel,
};
use serde::{Deserialize, Serialize};

use crate::cmd_fig1::write_text;
use crate::data::{load_source, slice};
use crate::error::{CliError, CliResult};
use crate::run::{parse_list, parse_widths, Command, Run};

pub const MLP_SUMMARY_SCHEMA: &str = "gdv-train-mlp/1";
pub const DBN_SUMMARY_SCHEMA: &str = "gdv-train-dbn/1";
pub const DREAM_SCHEMA: &str = "gdv-dream/1";

fn required<'a, T>(v: &'a Option<T>, flag: &str) -> CliResult<&'a T> {
    v.as_ref().ok_or_else(|| CliError::usage(format!("--{flag} is required")))
}

fn write_curve(run: &mut Run, out: &Path, stem: &str, curve: &GdvCurve) -> CliResult<()> {
    io::write_json(run.output(out.join(format!("{stem}.json"))), CURVE_SCHEMA, curve)?;
    io::write_curve_csv(run.output(out.join(format!("{stem}.csv"))), curve)?;
    Ok(())
}

fn series(name: &str, curve: &GdvCurve) -> LineSeries {
    LineSeries { name: name.into(), points: curve.points.iter().map(|p| (p.layer_index as f64, p.gdv)).collect() }
}

fn write_mds(run: &mut Run, out: &Path, layers: &[(String, LabeledDataset)], which: &[usize]) -> CliResult<()> {
    for &l in which {
        let (id, data) = layers
            .get(l)
            .ok_or_else(|| CliError::usage(format!("MDS layer {l} does not exist ({} layers)", layers.len())))?;
        let proj = mds_project(data)?;
        io::write_svg_scatter(run.output(out.join(format!("mds_layer_{l}.svg"))), &proj, &proj.labels, &format!("layer {l} ({id})"))?;
        io::save_projection_csv(run.output(out.join(format!("mds_layer_{l}.csv"))), &proj)?;
    }
    Ok(())
}

fn default_mds_layers(n_layers: usize) -> String {
    let last_hidden = n_layers.saturating_sub(2);
    let mut v = vec![0, last_hidden / 2, last_hidden];
    v.dedup();
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn mlp_curve(model: &MlpModel, data: &LabeledDataset) -> CliResult<(Vec<(String, LabeledDataset)>, GdvCurve)> {
    let layers = mlp_layer_activations(model, data)?;
    let curve = gdv_curve(&layers)?;
    Ok((layers, curve))
}

fn dbn_layers(model: &DbnModel, data: &LabeledDataset) -> CliResult<Vec<(String, LabeledDataset)>> {
    let reps = model.all_representations(data.points())?;
    reps.into_iter()
        .enumerate()
        .map(|(l, r)| {
            let id = if l == 0 { "input".to_string() } else { format!("rbm_{l}") };
            Ok((id, data.with_points(r)?))
        })
        .collect()
}

/// Trains a perceptron and reports its layer-wise GDV.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct TrainMlpArgs {
    /// Directory with an IDX image/label pair, or a labeled CSV file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Hidden widths, e.g. `64,64,32` or `64x8`.
    #[arg(long)]
    pub widths: Option<String>,
    #[arg(long)]
    pub activation: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Training rows, taken from the start of the data.
    #[arg(long)]
    pub train_size: Option<usize>,
    /// Test rows, taken right after the training rows.
    #[arg(long)]
    pub test_size: Option<usize>,
    /// Layers drawn as MDS scatters [default: input, middle and last hidden layer].
    #[arg(long)]
    pub mds_layers: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MlpSummary {
    pub layer_widths: Vec<usize>,
    pub test_accuracy: f64,
    pub train_accuracy: f64,
    pub test_curve: GdvCurve,
    pub train_curve: GdvCurve,
}

impl Command for TrainMlpArgs {
    const NAME: &'static str = "train-mlp";

    fn fill_defaults(&mut self) {
        let base = MlpConfig::new(vec![]);
        self.widths.get_or_insert_with(|| "64x8".into());
        self.activation.get_or_insert_with(|| base.hidden_activation.name().into());
        self.epochs.get_or_insert(10);
        self.batch_size.get_or_insert(base.batch_size);
        self.learning_rate.get_or_insert(base.learning_rate);
        self.seed.get_or_insert(base.seed);
        self.train_size.get_or_insert(8000);
        self.test_size.get_or_insert(2000);
        self.out_dir.get_or_insert_with(|| PathBuf::from("train-mlp"));
    }

    fn manifest_path(&self) -> Option<PathBuf> {
        self.out_dir.as_ref().map(|d| d.join("manifest.json"))
    }

    fn seeds(&self) -> Vec<u64> {
        self.seed.into_iter().collect()
    }

    fn execute(&self, run: &mut Run) -> CliResult<()> {
        let out = self.out_dir.clone().expect("defaults filled");
        let all = load_source(required(&self.data, "data")?)?;
        let train_size = self.train_size.expect("defaults filled");
        let train = slice(&all, 0, train_size)?;
        let test = slice(&all, train_size, self.test_size.expect("defaults filled"))?;
        let hidden = parse_widths(self.widths.as_deref().expect("defaults filled"))?;
        let n_classes = all.labels().iter().copied().max().unwrap_or(0) as usize + 1;
        let mut widths = vec![all.n_dims()];
        widths.extend(&hidden);
        widths.push(n_classes);
        let activation = self.activation.as_deref().expect("defaults filled");
        let cfg = MlpConfig {
            hidden_activation: Activation::from_name(activation)
                .ok_or_else(|| CliError::usage(format!("unknown activation `{activation}`")))?,
            epochs: self.epochs.expect("defaults filled"),
            batch_size: self.batch_size.expect("defaults filled"),
            learning_rate: self.learning_rate.expect("defaults filled"),
            seed: self.seed.expect("defaults filled"),
            ..MlpConfig::new(widths.clone())
        };
        run.log(format!("training {widths:?} on {} rows", train.n_points()));
        let model = mlp_train(&cfg, &train)?;
        let mut history = String::from("epoch,loss,accuracy\n");
        for h in &model.history {
            let _ = writeln!(history, "{},{},{}", h.epoch, io::table::fmt_f64(h.loss), io::table::fmt_f64(h.accuracy));
        }
        write_text(&run.output(out.join("history.csv")), &history)?;
        save_checkpoint(&run.output(out.join("model.gdvm")), &Checkpoint::Mlp(model.clone()))?;

        let (test_layers, test_curve) = mlp_curve(&model, &test)?;
        let probe = slice(&train, 0, test.n_points().min(train.n_points()))?;
        let (_, train_curve) = mlp_curve(&model, &probe)?;
        write_curve(run, &out, "curve_test", &test_curve)?;
        write_curve(run, &out, "curve_train", &train_curve)?;
        io::write_svg_lines(
            run.output(out.join("curve.svg")),
            &[series("test", &test_curve), series("train", &train_curve)],
            "GDV per layer",
            "layer",
            "GDV",
        )?;
        let mds = match &self.mds_layers {
            Some(s) => s.clone(),
            None => default_mds_layers(test_layers.len()),
        };
        write_mds(run, &out, &test_layers, &parse_list(&mds)?)?;

        let summary = MlpSummary {
            layer_widths: widths,
            test_accuracy: mlp_accuracy(&model, &test)?,
            train_accuracy: mlp_accuracy(&model, &train)?,
            test_curve,
            train_curve,
        };
        io::write_json(run.output(out.join("summary.json")), MLP_SUMMARY_SCHEMA, &summary)?;
        run.log(format!("test accuracy {:.4}", summary.test_accuracy));
        Ok(())
    }
}

/// Layer-wise GDV (and MDS scatters) of a saved model on some data.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct ProbeArgs {
    /// Checkpoint written by train-mlp or train-dbn.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub offset: Option<usize>,
    /// Number of rows to probe; 0 means all rows from the offset on.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub mds_layers: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl Command for ProbeArgs {
    const NAME: &'static str = "probe";

    fn fill_defaults(&mut self) {
        self.offset.get_or_insert(0);
        self.size.get_or_insert(2000);
        self.mds_layers.get_or_insert_with(String::new);
        self.out_dir.get_or_insert_with(|| PathBuf::from("probe"));
    }

    fn manifest_path(&self) -> Option<PathBuf> {
        self.out_dir.as_ref().map(|d| d.join("manifest.json"))
    }

    fn seeds(&self) -> Vec<u64> {
        Vec::new()
    }

    fn execute(&self, run: &mut Run) -> CliResult<()> {
        let out = self.out_dir.clone().expect("defaults filled");
        let data = slice(
            &load_source(required(&self.data, "data")?)?,
            self.offset.expect("defaults filled"),
            self.size.expect("defaults filled"),
        )?;
        let layers = match load_checkpoint(required(&self.model, "model")?)? {
            Checkpoint::Mlp(m) => mlp_layer_activations(&m, &data)?,
            Checkpoint::Dbn(d) => dbn_layers(&d, &data)?,
        };
        let curve = gdv_curve(&layers)?;
        write_curve(run, &out, "curve", &curve)?;
        io::write_svg_lines(run.output(out.join("curve.svg")), &[series("GDV", &curve)], "GDV per layer", "layer", "GDV")?;
        write_mds(run, &out, &layers, &parse_list(self.mds_layers.as_deref().expect("defaults filled"))?)?;
        run.log(format!("{} layers probed on {} rows", curve.len(), data.n_points()));
        Ok(())
    }
}

/// Greedy layer-wise training of a deep belief network.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct TrainDbnArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Hidden widths, e.g. `256x10`.
    #[arg(long)]
    pub widths: Option<String>,
    /// Epochs per RBM.
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub cd_steps: Option<usize>,
    #[arg(long)]
    pub momentum: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Keep only these labels (comma-separated) before taking training rows.
    #[arg(long)]
    pub classes: Option<String>,
    #[arg(long)]
    pub train_size: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DbnSummary {
    pub layer_widths: Vec<usize>,
    pub classes: Vec<u32>,
    pub n_train: usize,
    pub curve: GdvCurve,
    pub final_reconstruction_error: Vec<Option<f64>>,
}

impl Command for TrainDbnArgs {
    const NAME: &'static str = "train-dbn";

    fn fill_defaults(&mut self) {
        let base = DbnTrainConfig::new(vec![]);
        self.widths.get_or_insert_with(|| "256x10".into());
        self.epochs.get_or_insert(base.epochs);
        self.learning_rate.get_or_insert(base.learning_rate);
        self.batch_size.get_or_insert(base.batch_size);
        self.cd_steps.get_or_insert(base.cd_steps);
        self.momentum.get_or_insert(base.momentum);
        self.seed.get_or_insert(base.seed);
        self.classes.get_or_insert_with(String::new);
        self.train_size.get_or_insert(3000);
        self.out_dir.get_or_insert_with(|| PathBuf::from("train-dbn"));
    }

    fn manifest_path(&self) -> Option<PathBuf> {
        self.out_dir.as_ref().map(|d| d.join("manifest.json"))
    }

    fn seeds(&self) -> Vec<u64> {
        self.seed.into_iter().collect()
    }

    fn execute(&self, run: &mut Run) -> CliResult<()> {
        let out = self.out_dir.clone().expect("defaults filled");
        let mut data = load_source(required(&self.data, "data")?)?;
        let classes: Vec<u32> = parse_list(self.classes.as_deref().expect("defaults filled"))?;
        if !classes.is_empty() {
            data = data.filter_classes(&classes)?;
        }
        let train = slice(&data, 0, self.train_size.expect("defaults filled"))?;
        let mut widths = vec![train.n_dims()];
        widths.extend(parse_widths(self.widths.as_deref().expect("defaults filled"))?);
        let cfg = DbnTrainConfig {
            epochs: self.epochs.expect("defaults filled"),
            learning_rate: self.learning_rate.expect("defaults filled"),
            batch_size: self.batch_size.expect("defaults filled"),
            cd_steps: self.cd_steps.expect("defaults filled"),
            momentum: self.momentum.expect("defaults filled"),
            seed: self.seed.expect("defaults filled"),
            ..DbnTrainConfig::new(widths.clone())
        };
        run.log(format!("training {widths:?} on {} rows", train.n_points()));
        let model = dbn_train_greedy(train.points(), &cfg)?;
        save_checkpoint(&run.output(out.join("model.gdvm")), &Checkpoint::Dbn(model.clone()))?;
        let mut recon = String::from("layer,epoch,error\n");
        for (l, errs) in model.reconstruction_error.iter().enumerate() {
            for (e, v) in errs.iter().enumerate() {
                let _ = writeln!(recon, "{},{e},{}", l + 1, io::table::fmt_f64(*v));
            }
        }
        write_text(&run.output(out.join("reconstruction.csv")), &recon)?;
        let curve = gdv_curve(&dbn_layers(&model, &train)?)?;
        write_curve(run, &out, "curve", &curve)?;
        io::write_svg_lines(run.output(out.join("curve.svg")), &[series("GDV", &curve)], "GDV per layer", "layer", "GDV")?;
        let summary = DbnSummary {
            layer_widths: widths,
            classes,
            n_train: train.n_points(),
            final_reconstruction_error: model.reconstruction_error.iter().map(|e| e.last().copied()).collect(),
            curve,
        };
        io::write_json(run.output(out.join("summary.json")), DBN_SUMMARY_SCHEMA, &summary)?;
        Ok(())
    }
}

/// Prototype images reconstructed from sparsified layer activity.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct DreamArgs {
    /// Checkpoint written by train-dbn.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Images whose class members are dreamed from.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Layer index or comma-separated list.
    #[arg(long)]
    pub layer: Option<String>,
    /// Class id or comma-separated list.
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long)]
    pub offset: Option<usize>,
    /// Number of rows to use; 0 means all rows from the offset on.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DreamEntry {
    pub class_id: u32,
    pub layer: usize,
    /// Pearson correlation with the (normalized) class-mean image.
    pub correlation_to_class_mean: f64,
    pub image_csv: PathBuf,
}

impl Command for DreamArgs {
    const NAME: &'static str = "dream";

    fn fill_defaults(&mut self) {
        self.layer.get_or_insert_with(|| "1".into());
        self.class.get_or_insert_with(|| "0".into());
        self.offset.get_or_insert(0);
        self.size.get_or_insert(0);
        self.out_dir.get_or_insert_with(|| PathBuf::from("dream"));
    }

    fn manifest_path(&self) -> Option<PathBuf> {
        self.out_dir.as_ref().map(|d| d.join("manifest.json"))
    }

    fn seeds(&self) -> Vec<u64> {
        Vec::new()
    }

    fn execute(&self, run: &mut Run) -> CliResult<()> {
        let out = self.out_dir.clone().expect("defaults filled");
        let Checkpoint::Dbn(model) = load_checkpoint(required(&self.model, "model")?)? else {
            return Err(CliError::usage("dreaming needs a DBN checkpoint"));
        };
        let data = slice(
            &load_source(required(&self.data, "data")?)?,
            self.offset.expect("defaults filled"),
            self.size.expect("defaults filled"),
        )?;
        let layers: Vec<usize> = parse_list(self.layer.as_deref().expect("defaults filled"))?;
        let classes: Vec<u32> = parse_list(self.class.as_deref().expect("defaults filled"))?;
        let mut entries = Vec::new();
        for &c in &classes {
            let mean = prototype_reconstruct(&model, 0, c, &data)?.flat();
            for &l in &layers {
                let pip = prototype_reconstruct(&model, l, c, &data)?;
                let mut csv = String::new();
                for row in pip.pixels.rows() {
                    let cells: Vec<String> = row.iter().map(|v| io::table::fmt_f64(*v)).collect();
                    let _ = writeln!(csv, "{}", cells.join(","));
                }
                let stem = format!("prototype_c{c}_l{l}");
                let csv_path = run.output(out.join(format!("{stem}.csv")));
                write_text(&csv_path, &csv)?;
                io::write_svg_image(run.output(out.join(format!("{stem}.svg"))), &pip.pixels, &format!("class {c}, layer {l}"))?;
                let r = correlation(&pip.flat(), &mean);
                run.log(format!("class {c} layer {l}: correlation with class mean {r:.3}"));
                entries.push(DreamEntry { class_id: c, layer: l, correlation_to_class_mean: r, image_csv: csv_path });
            }
        }
        io::write_json(run.output(out.join("dream.json")), DREAM_SCHEMA, &entries)?;
        Ok(())
    }
}
