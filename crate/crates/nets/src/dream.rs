//! Prototype reconstruction ("dreaming"): sparsify a layer's activity and
//! propagate it back down to the input space.

use gdv_core::{Label, LabeledDataset};
use ndarray::{Array1, Array2, Axis};

use crate::dbn::DbnModel;
use crate::error::{NetError, Result};

pub const IMAGE_SIDE: usize = 28;

/// A 28×28 image with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeImage {
    pub pixels: Array2<f64>,
    pub class_id: Label,
    pub layer_index: usize,
}

impl PrototypeImage {
    pub fn flat(&self) -> Array1<f64> {
        Array1::from_iter(self.pixels.iter().copied())
    }
}

/// Number of units kept by [`sparsify_top`]: ten percent, rounded up.
pub fn sparse_count(width: usize) -> usize {
    width.div_ceil(10)
}

/// Sets the `⌈0.1·width⌉` largest entries to one and the rest to zero.
/// Among equal values the lowest index wins.
pub fn sparsify_top(activity: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..activity.len()).collect();
    idx.sort_by(|&a, &b| activity[b].total_cmp(&activity[a]).then(a.cmp(&b)));
    let mut out = vec![0.0; activity.len()];
    for &i in &idx[..sparse_count(activity.len())] {
        out[i] = 1.0;
    }
    out
}

/// Rescales to `[0, 1]`; a constant input maps to all zeros.
pub fn min_max_normalize(values: &Array1<f64>) -> Array1<f64> {
    let lo = values.fold(f64::INFINITY, |m, &v| m.min(v));
    let hi = values.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    if hi > lo {
        values.mapv(|v| ((v - lo) / (hi - lo)).clamp(0.0, 1.0))
    } else {
        Array1::zeros(values.len())
    }
}

/// Prototype of `class_id` at `layer`: the min-max normalized mean over all
/// class images of their sparsified, back-propagated layer activity. At
/// layer 0 this is the normalized class mean.
pub fn prototype_reconstruct(model: &DbnModel, layer: usize, class_id: Label, test_set: &LabeledDataset) -> Result<PrototypeImage> {
    if layer > model.depth() {
        return Err(NetError::LayerOutOfRange { layer, depth: model.depth() });
    }
    if test_set.n_dims() != IMAGE_SIDE * IMAGE_SIDE {
        return Err(NetError::ShapeMismatch { what: "image size", expected: IMAGE_SIDE * IMAGE_SIDE, found: test_set.n_dims() });
    }
    let members: Vec<usize> = (0..test_set.n_points()).filter(|&i| test_set.labels()[i] == class_id).collect();
    if members.is_empty() {
        return Err(NetError::NoClassImages(class_id));
    }
    let images = test_set.points().select(Axis(0), &members);
    let reconstructed = if layer == 0 {
        images
    } else {
        let activity = model.propagate_up(&images, layer)?;
        let mut sparse = Array2::zeros(activity.raw_dim());
        for (row, mut out) in activity.rows().into_iter().zip(sparse.rows_mut()) {
            let s = sparsify_top(&row.to_vec());
            out.assign(&Array1::from(s));
        }
        model.propagate_down(&sparse, layer)?
    };
    let mean = reconstructed.mean_axis(Axis(0)).expect("at least one image");
    let pixels = min_max_normalize(&mean)
        .into_shape_with_order((IMAGE_SIDE, IMAGE_SIDE))
        .expect("784 values");
    Ok(PrototypeImage { pixels, class_id, layer_index: layer })
}

/// Pearson correlation of two equally long vectors; zero if either is constant.
pub fn correlation(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    let (ma, mb) = (a.mean().unwrap_or(0.0), b.mean().unwrap_or(0.0));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_counts() {
        assert_eq!(sparse_count(20), 2);
        assert_eq!(sparse_count(256), 26);
        assert_eq!(sparse_count(1), 1);
        assert_eq!(sparse_count(10), 1);
        assert_eq!(sparse_count(11), 2);
    }

    #[test]
    fn sparsify_keeps_top_with_low_index_ties() {
        let a = [0.1, 0.9, 0.5, 0.9, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.3, 0.9];
        let s = sparsify_top(&a);
        assert_eq!(s.iter().filter(|&&v| v == 1.0).count(), 2);
        assert_eq!(s[1], 1.0);
        assert_eq!(s[3], 1.0);
        assert_eq!(s[11], 0.0);
    }

    #[test]
    fn normalize_flat_is_zero() {
        assert_eq!(min_max_normalize(&Array1::from(vec![3.0; 4])), Array1::<f64>::zeros(4));
        assert_eq!(min_max_normalize(&Array1::from(vec![1.0, 3.0, 2.0])), Array1::from(vec![0.0, 1.0, 0.5]));
    }

    #[test]
    fn correlation_basics() {
        let a = Array1::from(vec![1.0, 2.0, 3.0]);
        assert!((correlation(&a, &(&a * 2.0 + 1.0)) - 1.0).abs() < 1e-12);
        assert!((correlation(&a, &(-&a)) + 1.0).abs() < 1e-12);
        assert_eq!(correlation(&a, &Array1::from(vec![1.0; 3])), 0.0);
    }
}
