//! The generalized discrimination value (GDV).
//!
//! Every dimension is z-scored with the population standard deviation and
//! multiplied by one half. On the rescaled points the mean intra-class
//! distance of each class and the mean inter-class distance of each class
//! pair are computed; the GDV is the difference between their averages,
//! divided by the square root of the number of (non-constant) dimensions:
//!
//! ```text
//! gdv = (1/sqrt(D')) * ( mean_l intra(l) - mean_{l<m} inter(l, m) )
//! ```
//!
//! Values near zero mean no class structure, more negative values mean
//! better separated classes.
//!
//! Pair sums run in a fixed order (classes by ascending id, points by
//! ascending index). Work is split by rows and each row is summed
//! sequentially, so parallel and serial evaluation give bit-identical results.

use std::collections::BTreeMap;

use ndarray::{Array2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Label, LabeledDataset};
use crate::error::{Error, Result};

/// Distance used between rescaled points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Some(Metric::Euclidean),
            _ => None,
        }
    }

    #[inline]
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// Half-z-scored coordinates `s = 0.5 * (x - mean) / std` of the non-constant dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledDataset {
    pub points: Array2<f64>,
    pub labels: Vec<Label>,
    pub kept_dims: Vec<usize>,
    pub dropped_dims: Vec<usize>,
    /// Mean of every original dimension.
    pub per_dim_mean: Vec<f64>,
    /// Population standard deviation of every original dimension (0 for dropped ones).
    pub per_dim_std: Vec<f64>,
}

impl ScaledDataset {
    pub fn effective_dim(&self) -> usize {
        self.kept_dims.len()
    }
}

/// Half-z-scores every dimension; dimensions whose values are all identical are dropped.
pub fn z_score_half(data: &LabeledDataset) -> Result<ScaledDataset> {
    let x = data.points();
    let n = x.nrows() as f64;
    let mut kept_dims = Vec::new();
    let mut dropped_dims = Vec::new();
    let mut per_dim_mean = Vec::with_capacity(x.ncols());
    let mut per_dim_std = Vec::with_capacity(x.ncols());
    let mut columns = Vec::new();

    for (d, col) in x.axis_iter(Axis(1)).enumerate() {
        let mean = col.sum() / n;
        per_dim_mean.push(mean);
        // Exact equality test: a constant column can leave a rounding-sized
        // nonzero variance behind, which would blow up instead of being dropped.
        let first = col[0];
        if col.iter().all(|&v| v == first) {
            per_dim_std.push(0.0);
            dropped_dims.push(d);
            continue;
        }
        let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let std = var.sqrt();
        per_dim_std.push(std);
        kept_dims.push(d);
        columns.push(col.mapv(|v| 0.5 * (v - mean) / std));
    }

    if kept_dims.is_empty() {
        return Err(Error::AllDimensionsConstant);
    }

    let mut points = Array2::zeros((x.nrows(), kept_dims.len()));
    for (j, col) in columns.into_iter().enumerate() {
        points.column_mut(j).assign(&col);
    }
    Ok(ScaledDataset {
        points,
        labels: data.labels().to_vec(),
        kept_dims,
        dropped_dims,
        per_dim_mean,
        per_dim_std,
    })
}

/// Contiguous row-major copy of selected rows.
struct Block {
    data: Vec<f64>,
    dim: usize,
}

impl Block {
    fn gather(points: &Array2<f64>, members: &[usize]) -> Self {
        let dim = points.ncols();
        let mut data = Vec::with_capacity(members.len() * dim);
        for &i in members {
            data.extend(points.row(i).iter());
        }
        Self { data, dim }
    }

    fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

fn sum_in_order(parts: Vec<f64>) -> f64 {
    parts.into_iter().fold(0.0, |acc, v| acc + v)
}

fn intra_block(block: &Block, metric: Metric, parallel: bool) -> f64 {
    let n = block.len();
    let row_sum = |i: usize| {
        let a = block.row(i);
        ((i + 1)..n).fold(0.0, |acc, j| acc + metric.distance(a, block.row(j)))
    };
    let parts: Vec<f64> = if parallel {
        (0..n).into_par_iter().map(row_sum).collect()
    } else {
        (0..n).map(row_sum).collect()
    };
    let pairs = (n * (n - 1) / 2) as f64;
    sum_in_order(parts) / pairs
}

fn inter_block(a: &Block, b: &Block, metric: Metric, parallel: bool) -> f64 {
    let row_sum = |i: usize| {
        let p = a.row(i);
        (0..b.len()).fold(0.0, |acc, j| acc + metric.distance(p, b.row(j)))
    };
    let parts: Vec<f64> = if parallel {
        (0..a.len()).into_par_iter().map(row_sum).collect()
    } else {
        (0..a.len()).map(row_sum).collect()
    };
    sum_in_order(parts) / (a.len() * b.len()) as f64
}

/// Mean pairwise Euclidean distance within one class.
pub fn mean_intra_class_distance(scaled: &ScaledDataset, members: &[usize]) -> Result<f64> {
    if members.len() < 2 {
        return Err(Error::ClassTooSmall { class: None, size: members.len() });
    }
    Ok(intra_block(&Block::gather(&scaled.points, members), Metric::Euclidean, false))
}

/// Mean Euclidean distance over all cross pairs of two point sets.
pub fn mean_inter_class_distance(
    scaled: &ScaledDataset,
    members_l: &[usize],
    members_m: &[usize],
) -> Result<f64> {
    if members_l.is_empty() || members_m.is_empty() {
        return Err(Error::EmptyClass);
    }
    let a = Block::gather(&scaled.points, members_l);
    let b = Block::gather(&scaled.points, members_m);
    Ok(inter_block(&a, &b, Metric::Euclidean, false))
}

/// Mean inter-class distance of one unordered class pair (`first < second`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPairDistance {
    pub first: Label,
    pub second: Label,
    pub mean_distance: f64,
}

/// The GDV together with every quantity it is computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdvReport {
    pub gdv: f64,
    pub intra: BTreeMap<Label, f64>,
    pub inter: Vec<ClassPairDistance>,
    pub class_counts: BTreeMap<Label, usize>,
    pub effective_dim: usize,
    pub n_classes: usize,
    pub metric_name: String,
    #[serde(default)]
    pub dropped_dims: Vec<usize>,
}

impl GdvReport {
    /// Evaluates the GDV formula from the stored intra/inter statistics.
    pub fn recompute(&self) -> f64 {
        let sorted_sum = |mut v: Vec<f64>| {
            v.sort_by(f64::total_cmp);
            v.into_iter().sum::<f64>()
        };
        let l = self.n_classes as f64;
        let intra_mean = sorted_sum(self.intra.values().copied().collect()) / l;
        let inter_mean = sorted_sum(self.inter.iter().map(|p| p.mean_distance).collect()) * 2.0 / (l * (l - 1.0));
        (intra_mean - inter_mean) / (self.effective_dim as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdvOptions {
    pub metric: Metric,
    /// Split the pair loops across the rayon pool.
    pub parallel: bool,
}

impl Default for GdvOptions {
    fn default() -> Self {
        Self { metric: Metric::Euclidean, parallel: true }
    }
}

/// GDV of a labeled point set with default options (Euclidean, parallel).
pub fn gdv(data: &LabeledDataset) -> Result<GdvReport> {
    gdv_with(data, GdvOptions::default())
}

pub fn gdv_with(data: &LabeledDataset, opts: GdvOptions) -> Result<GdvReport> {
    let members = data.class_members();
    if members.len() < 2 {
        return Err(Error::SingleClass { found: members.len() });
    }
    if let Some((&class, idx)) = members.iter().find(|(_, idx)| idx.len() < 2) {
        return Err(Error::ClassTooSmall { class: Some(class), size: idx.len() });
    }
    let scaled = z_score_half(data)?;

    let blocks: Vec<(Label, usize, Block)> = members
        .iter()
        .map(|(&c, idx)| (c, idx[0], Block::gather(&scaled.points, idx)))
        .collect();

    let intra: BTreeMap<Label, f64> = blocks
        .iter()
        .map(|(c, _, b)| (*c, intra_block(b, opts.metric, opts.parallel)))
        .collect();
    let mut inter = Vec::with_capacity(blocks.len() * (blocks.len() - 1) / 2);
    for (i, (cl, fl, bl)) in blocks.iter().enumerate() {
        for (cm, fm, bm) in &blocks[i + 1..] {
            // The class holding the earlier data row is always the outer loop,
            // so renaming classes cannot change the summation order.
            let (outer, inner) = if fl < fm { (bl, bm) } else { (bm, bl) };
            inter.push(ClassPairDistance {
                first: *cl,
                second: *cm,
                mean_distance: inter_block(outer, inner, opts.metric, opts.parallel),
            });
        }
    }

    let mut report = GdvReport {
        gdv: 0.0,
        intra,
        inter,
        class_counts: members.iter().map(|(&c, idx)| (c, idx.len())).collect(),
        effective_dim: scaled.effective_dim(),
        n_classes: members.len(),
        metric_name: opts.metric.name().to_string(),
        dropped_dims: scaled.dropped_dims,
    };
    report.gdv = report.recompute();
    Ok(report)
}

/// One layer's entry of a [`GdvCurve`]. `gdv` is `None` when the layer was degenerate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub layer_index: usize,
    pub layer_id: String,
    pub gdv: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// GDV per layer, in input order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GdvCurve {
    pub points: Vec<CurvePoint>,
}

impl GdvCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.gdv).collect()
    }

    pub fn get(&self, layer_index: usize) -> Option<f64> {
        self.points.get(layer_index).and_then(|p| p.gdv)
    }
}

/// GDV of every layer. A layer whose GDV cannot be computed leaves a gap
/// (with the error name recorded) instead of failing the whole curve.
pub fn gdv_curve(layers: &[(String, LabeledDataset)]) -> Result<GdvCurve> {
    let first = layers
        .first()
        .ok_or_else(|| Error::InvalidDataset("no layers given".into()))?;
    if let Some(layer) = layers.iter().position(|(_, ds)| ds.labels() != first.1.labels()) {
        return Err(Error::LabelMismatch { layer });
    }
    let points = layers
        .iter()
        .enumerate()
        .map(|(i, (id, ds))| {
            let (gdv, error) = match gdv(ds) {
                Ok(r) => (Some(r.gdv), None),
                Err(e) => (None, Some(e.name().to_string())),
            };
            CurvePoint { layer_index: i, layer_id: id.clone(), gdv, error }
        })
        .collect();
    Ok(GdvCurve { points })
}
