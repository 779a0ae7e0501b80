//! Random transformations of datasets and the resulting GDV changes.

use ndarray::{Array2, Axis};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::metric::gdv;
use crate::synthetic::{stream_rng, EnsembleConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    /// `y = A x`, `A` square.
    RandomLinear,
    /// `y = logistic(A x)`, `A` square.
    RandomLinearLogistic,
    /// `y = A x`, `A` maps `D` to `2D` dimensions.
    RandomLinearDoubleDim,
    /// `y = logistic(A x)`, `A` maps `D` to `2D` dimensions.
    RandomLinearDoubleDimLogistic,
    /// `y = logistic(scale_factor * x)`.
    ScaleLogistic,
}

impl TransformKind {
    pub const ALL: [TransformKind; 5] = [
        TransformKind::RandomLinear,
        TransformKind::RandomLinearLogistic,
        TransformKind::RandomLinearDoubleDim,
        TransformKind::RandomLinearDoubleDimLogistic,
        TransformKind::ScaleLogistic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::RandomLinear => "random_linear",
            TransformKind::RandomLinearLogistic => "random_linear_logistic",
            TransformKind::RandomLinearDoubleDim => "random_linear_double_dim",
            TransformKind::RandomLinearDoubleDimLogistic => "random_linear_double_dim_logistic",
            TransformKind::ScaleLogistic => "scale_logistic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn logistic(self) -> bool {
        matches!(
            self,
            TransformKind::RandomLinearLogistic
                | TransformKind::RandomLinearDoubleDimLogistic
                | TransformKind::ScaleLogistic
        )
    }

    pub fn output_dim(self, input_dim: usize) -> usize {
        match self {
            TransformKind::RandomLinearDoubleDim | TransformKind::RandomLinearDoubleDimLogistic => 2 * input_dim,
            _ => input_dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: TransformKind,
    /// Matrix entries are drawn uniformly from this interval.
    pub element_range: (f64, f64),
    /// Factor used by [`TransformKind::ScaleLogistic`].
    pub scale_factor: f64,
    /// Subtract the per-dimension mean before transforming. Irrelevant for
    /// the purely linear kinds, it places the logistic kinks at the data
    /// center for the others.
    pub center_input: bool,
    pub seed: u64,
}

impl TransformSpec {
    pub fn new(kind: TransformKind, seed: u64) -> Self {
        Self { kind, element_range: (-10.0, 10.0), scale_factor: 10.0, center_input: true, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.element_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidSpec(format!("element range [{lo}, {hi}] is empty")));
        }
        if !self.scale_factor.is_finite() {
            return Err(Error::InvalidSpec("scale factor must be finite".into()));
        }
        Ok(())
    }

    /// Draws a concrete map for a `dim`-dimensional input.
    pub fn draw<R: Rng>(&self, dim: usize, rng: &mut R) -> LinearMap {
        let out = self.kind.output_dim(dim);
        let matrix = match self.kind {
            TransformKind::ScaleLogistic => Array2::from_diag_elem(dim, self.scale_factor),
            _ => {
                let (lo, hi) = self.element_range;
                Array2::from_shape_fn((out, dim), |_| rng.gen_range(lo..hi))
            }
        };
        LinearMap { matrix, logistic: self.kind.logistic(), center_input: self.center_input }
    }
}

/// `y = f(A (x - c))` with `f` the identity or the logistic function and
/// `c` the data mean (or zero).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub matrix: Array2<f64>,
    pub logistic: bool,
    pub center_input: bool,
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl LinearMap {
    pub fn identity(dim: usize) -> Self {
        Self { matrix: Array2::eye(dim), logistic: false, center_input: false }
    }

    pub fn apply(&self, data: &LabeledDataset) -> Result<LabeledDataset> {
        if self.matrix.ncols() != data.n_dims() {
            return Err(Error::WrongDimension { expected: self.matrix.ncols(), found: data.n_dims() });
        }
        let mut x = data.points().clone();
        if self.center_input {
            let mean = x.mean_axis(Axis(0)).expect("dataset is non-empty");
            x -= &mean;
        }
        let mut y = x.dot(&self.matrix.t());
        if self.logistic {
            y.mapv_inplace(logistic);
        }
        data.with_points(y)
    }
}

/// Applies a freshly drawn transform of `spec.kind`; the matrix comes from `spec.seed`.
pub fn apply_transform(data: &LabeledDataset, spec: &TransformSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, 0);
    spec.draw(data.n_dims(), &mut rng).apply(data)
}

/// Uniform histogram; values outside the range land in the edge bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(lo < hi && bins > 0);
        Self { lo, hi, counts: vec![0; bins] }
    }

    /// 61 bins over [-0.15, 0.15], the layout used for GDV changes.
    pub fn for_deltas() -> Self {
        Self::new(-0.15, 0.15, 61)
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.bin_width()
    }

    pub fn add(&mut self, v: f64) {
        let last = self.counts.len() - 1;
        let pos = ((v - self.lo) / self.bin_width()).floor();
        let i = if pos.is_nan() || pos < 0.0 { 0 } else { (pos as usize).min(last) };
        self.counts[i] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Total-variation distance between the normalized histograms (same binning).
    pub fn total_variation(&self, other: &Histogram) -> f64 {
        assert_eq!(self.counts.len(), other.counts.len());
        let (a, b) = (self.total() as f64, other.total() as f64);
        0.5 * self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(&x, &y)| (x as f64 / a - y as f64 / b).abs())
            .sum::<f64>()
    }
}

/// Outcome for one ensemble member.
#[derive(Debug, Clone, Copy, PartialEq)]
enum MemberOutcome {
    Valid { before: f64, after: f64 },
    Singleton,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaGdvStats {
    pub kind: TransformKind,
    pub mean_before: f64,
    pub mean_after: f64,
    pub mean_delta: f64,
    pub std_delta: f64,
    pub min_delta: f64,
    pub max_delta: f64,
    pub histogram: Histogram,
    pub n_valid: usize,
    /// Members with size-1 classes plus members whose GDV was undefined after transforming.
    pub n_skipped: usize,
    pub n_skipped_singleton: usize,
    pub n_skipped_degenerate: usize,
}

/// GDV before and after one freshly drawn transform for every member of the
/// first `n_datasets` ensemble datasets. Member `k` draws its matrix from
/// stream `k` of `spec.seed`. Aggregation runs in index order.
pub fn delta_gdv_experiment(
    cfg: &EnsembleConfig,
    spec: &TransformSpec,
    n_datasets: usize,
) -> Result<DeltaGdvStats> {
    cfg.validate()?;
    spec.validate()?;
    if n_datasets == 0 {
        return Err(Error::InvalidSpec("n_datasets must be at least 1".into()));
    }
    let outcomes: Vec<MemberOutcome> = (0..n_datasets)
        .into_par_iter()
        .map(|k| -> Result<MemberOutcome> {
            let member = cfg.member(k)?;
            if member.has_singleton_class {
                return Ok(MemberOutcome::Singleton);
            }
            let Ok(before) = gdv(&member.dataset) else {
                return Ok(MemberOutcome::Degenerate);
            };
            let mut rng = stream_rng(spec.seed, k as u64);
            let transformed = spec.draw(member.dataset.n_dims(), &mut rng).apply(&member.dataset)?;
            Ok(match gdv(&transformed) {
                Ok(after) => MemberOutcome::Valid { before: before.gdv, after: after.gdv },
                Err(_) => MemberOutcome::Degenerate,
            })
        })
        .collect::<Result<_>>()?;

    let mut histogram = Histogram::for_deltas();
    let (mut n_singleton, mut n_degenerate) = (0, 0);
    let mut before = Vec::new();
    let mut after = Vec::new();
    let mut deltas = Vec::new();
    for o in outcomes {
        match o {
            MemberOutcome::Valid { before: b, after: a } => {
                before.push(b);
                after.push(a);
                deltas.push(a - b);
                histogram.add(a - b);
            }
            MemberOutcome::Singleton => n_singleton += 1,
            MemberOutcome::Degenerate => n_degenerate += 1,
        }
    }
    let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
    let mean_delta = mean(&deltas);
    let var = deltas.iter().map(|d| (d - mean_delta).powi(2)).sum::<f64>() / deltas.len().max(1) as f64;
    Ok(DeltaGdvStats {
        kind: spec.kind,
        mean_before: mean(&before),
        mean_after: mean(&after),
        mean_delta,
        std_delta: var.sqrt(),
        min_delta: deltas.iter().copied().fold(f64::INFINITY, f64::min),
        max_delta: deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        histogram,
        n_valid: deltas.len(),
        n_skipped: n_singleton + n_degenerate,
        n_skipped_singleton: n_singleton,
        n_skipped_degenerate: n_degenerate,
    })
}

/// GDV distribution over the untransformed ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleGdvStats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    /// 61 bins over [-0.6, 0.1].
    pub histogram: Histogram,
    pub n_valid: usize,
    pub n_skipped: usize,
}

pub fn ensemble_gdv_stats(cfg: &EnsembleConfig) -> Result<EnsembleGdvStats> {
    cfg.validate()?;
    let values: Vec<Option<f64>> = (0..cfg.n_datasets)
        .into_par_iter()
        .map(|k| -> Result<Option<f64>> {
            let m = cfg.member(k)?;
            if m.has_singleton_class {
                return Ok(None);
            }
            Ok(gdv(&m.dataset).ok().map(|r| r.gdv))
        })
        .collect::<Result<_>>()?;
    let valid: Vec<f64> = values.iter().flatten().copied().collect();
    let mut histogram = Histogram::new(-0.6, 0.1, 61);
    valid.iter().for_each(|&v| histogram.add(v));
    let n = valid.len() as f64;
    let mean = valid.iter().sum::<f64>() / n;
    let std = (valid.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    Ok(EnsembleGdvStats {
        mean,
        std,
        min: valid.iter().copied().fold(f64::INFINITY, f64::min),
        max: valid.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        histogram,
        n_valid: valid.len(),
        n_skipped: values.len() - valid.len(),
    })
}
