//! Classical (Torgerson) multidimensional scaling onto two dimensions.
//!
//! The squared Euclidean distance matrix is double centered,
//! `B = -1/2 J D² J`, and the two leading eigenpairs of `B` are found by
//! block subspace iteration with Rayleigh-Ritz extraction. Coordinates are
//! the eigenvectors scaled by the square roots of their eigenvalues.

use ndarray::{s, Array1, Array2, ArrayView1, Axis};
use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::synthetic::stream_rng;

#[derive(Debug, Clone, PartialEq)]
pub struct MdsOptions {
    /// Larger inputs are replaced by a seeded uniform subsample of this size.
    pub max_points: usize,
    pub subsample_seed: u64,
    /// Convergence threshold on `|B v - λ v|`, relative to `max(1, λ₁)`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for MdsOptions {
    fn default() -> Self {
        Self { max_points: 3000, subsample_seed: 0, tolerance: 1e-10, max_iterations: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection2D {
    /// `N × 2` coordinates.
    pub coords: Array2<f64>,
    pub labels: Vec<Label>,
    /// Two leading eigenvalues of the double-centered Gram matrix, descending.
    pub eigenvalues: [f64; 2],
    /// `sqrt(Σ (d - d̂)² / Σ d²)` over all point pairs.
    pub stress: f64,
    /// Input rows kept when the data was subsampled.
    pub subsample: Option<Vec<usize>>,
    /// Largest eigen-residual of the returned pairs.
    pub residual: f64,
    pub iterations: usize,
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Double-centered Gram matrix `-1/2 J D² J` of the rows of `x`.
pub fn double_centered_gram(x: &Array2<f64>) -> Array2<f64> {
    let n = x.nrows();
    let mut b = Array2::<f64>::zeros((n, n));
    b.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            for j in 0..n {
                row[j] = sq_dist(x.row(i), x.row(j));
            }
        });
    let row_mean = b.mean_axis(Axis(1)).expect("n > 0");
    let grand = row_mean.mean().expect("n > 0");
    for i in 0..n {
        for j in 0..n {
            // D² is symmetric: column means equal row means.
            b[[i, j]] = -0.5 * (b[[i, j]] - row_mean[i] - row_mean[j] + grand);
        }
    }
    b
}

/// Orthonormalizes the columns in place (modified Gram-Schmidt, two passes).
fn orthonormalize(q: &mut Array2<f64>) {
    for _ in 0..2 {
        for k in 0..q.ncols() {
            for j in 0..k {
                let proj = q.column(j).dot(&q.column(k));
                let qj = q.column(j).to_owned();
                q.column_mut(k).scaled_add(-proj, &qj);
            }
            let norm = q.column(k).dot(&q.column(k)).sqrt();
            if norm > 1e-300 {
                q.column_mut(k).mapv_inplace(|v| v / norm);
            }
        }
    }
}

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (descending) and eigenvectors as columns.
pub fn jacobi_eigen(a: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[[i, j]] * a[[i, j]])
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[j, j]].total_cmp(&a[[i, i]]));
    let values = Array1::from_iter(order.iter().map(|&i| a[[i, i]]));
    let vectors = v.select(Axis(1), &order);
    (values, vectors)
}

/// Leading eigenpairs of a symmetric positive semi-definite matrix.
#[derive(Debug, Clone)]
pub struct TopEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, unit norm.
    pub vectors: Array2<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Block subspace iteration for the `k` largest eigenpairs of symmetric PSD `b`.
pub fn top_eigenpairs(b: &Array2<f64>, k: usize, tolerance: f64, max_iterations: usize) -> Result<TopEigen> {
    let n = b.nrows();
    let block = (k + 6).min(n);
    // Deterministic start: a fixed pseudo-random block.
    let mut q = Array2::from_shape_fn((n, block), |(i, j)| {
        let x = ((i * 7919 + j * 104_729 + 13) % 1009) as f64 / 1009.0;
        x - 0.5 + if i == j { 1.0 } else { 0.0 }
    });
    orthonormalize(&mut q);

    let mut last = None;
    for it in 1..=max_iterations {
        let z = b.dot(&q);
        let h = q.t().dot(&z);
        let (vals, u) = jacobi_eigen(&h);
        let ritz = q.dot(&u);
        let bz = z.dot(&u);
        let scale = vals[0].abs().max(1.0);
        let residuals: Vec<f64> = (0..k)
            .map(|c| {
                let r = &bz.column(c) - &(&ritz.column(c) * vals[c]);
                r.dot(&r).sqrt()
            })
            .collect();
        let done = residuals.iter().all(|&r| r <= tolerance * scale);
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        if done {
            return Ok(TopEigen {
                values: vals.slice(s![..k]).to_vec(),
                vectors: ritz.slice(s![.., ..k]).to_owned(),
                residuals,
                iterations: it,
            });
        }
        last = Some(worst);
        // Next block: B applied to the Ritz vectors, re-orthonormalized.
        q = bz;
        orthonormalize(&mut q);
    }
    Err(Error::EigenNoConvergence { iterations: max_iterations, residual: last.unwrap_or(f64::NAN) })
}

fn fix_sign(mut v: ndarray::ArrayViewMut1<'_, f64>) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * max) {
        if *first < 0.0 {
            v.mapv_inplace(|x| -x);
        }
    }
}

/// Kruskal stress of `coords` against the original points.
fn stress(x: &Array2<f64>, coords: &Array2<f64>) -> f64 {
    let n = x.nrows();
    let (num, den) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut num = 0.0;
            let mut den = 0.0;
            for j in (i + 1)..n {
                let d = sq_dist(x.row(i), x.row(j)).sqrt();
                let e = sq_dist(coords.row(i), coords.row(j)).sqrt();
                num += (d - e) * (d - e);
                den += d * d;
            }
            (num, den)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        0.0
    }
}

pub fn mds_project(data: &LabeledDataset) -> Result<Projection2D> {
    mds_project_with(data, &MdsOptions::default())
}

pub fn mds_project_with(data: &LabeledDataset, opts: &MdsOptions) -> Result<Projection2D> {
    let n = data.n_points();
    if n < 3 {
        return Err(Error::TooFewPoints { found: n, required: 3 });
    }
    let (x, labels, subsample) = if n > opts.max_points {
        let mut rng = stream_rng(opts.subsample_seed, 0);
        let mut idx = sample(&mut rng, n, opts.max_points).into_vec();
        idx.sort_unstable();
        let sub = data.select(&idx)?;
        (sub.points().clone(), sub.labels().to_vec(), Some(idx))
    } else {
        (data.points().clone(), data.labels().to_vec(), None)
    };

    let b = double_centered_gram(&x);
    let top = top_eigenpairs(&b, 2, opts.tolerance, opts.max_iterations)?;
    if top.values[0] <= 0.0 || top.values[0] <= 1e-12 * b.iter().fold(0.0f64, |m, v| m.max(v.abs())) {
        return Err(Error::DegenerateSpectrum(top.values[0]));
    }
    let mut vectors = top.vectors;
    for c in 0..2 {
        fix_sign(vectors.column_mut(c));
    }
    let mut coords = Array2::zeros((x.nrows(), 2));
    for c in 0..2 {
        let scale = top.values[c].max(0.0).sqrt();
        coords.column_mut(c).assign(&(&vectors.column(c) * scale));
    }
    let stress = stress(&x, &coords);
    Ok(Projection2D {
        coords,
        labels,
        eigenvalues: [top.values[0], top.values[1]],
        stress,
        subsample,
        residual: top.residuals.iter().copied().fold(0.0, f64::max),
        iterations: top.iterations,
    })
}
