//! Seeded Gaussian cluster generators.
//!
//! Random numbers come from `rand_chacha::ChaCha8Rng` (rand_chacha 0.3),
//! seeded with `seed_from_u64`. Normal deviates are drawn with
//! `rand_distr::StandardNormal` (rand_distr 0.4, ziggurat method); both
//! crate versions are pinned by the workspace manifest because changing
//! them changes every generated dataset.
//!
//! Ensemble member `k` uses ChaCha stream `k` of the configured seed, so any
//! member can be regenerated on its own and members can be produced in
//! parallel with identical results.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Label, LabeledDataset};
use crate::error::{Error, Result};

/// Seeded generator on ChaCha stream `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-dimension standard deviations, shared by all classes or given per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sigmas {
    Shared(Vec<f64>),
    PerClass(Vec<Vec<f64>>),
}

/// Axis-aligned Gaussian clusters: class `k` is centered on row `k` of `centers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub centers: Vec<Vec<f64>>,
    pub sigmas: Sigmas,
    pub points_per_class: Vec<usize>,
    pub seed: u64,
}

impl ClusterSpec {
    /// Two clusters at (0,0) and (1,1) with isotropic standard deviation `sigma`.
    pub fn two_clusters(sigma: f64, per_class: usize, seed: u64) -> Self {
        Self {
            centers: vec![vec![0.0, 0.0], vec![1.0, 1.0]],
            sigmas: Sigmas::Shared(vec![sigma, sigma]),
            points_per_class: vec![per_class, per_class],
            seed,
        }
    }

    /// Well separated pair: covariance 0.04·I.
    pub fn separated(seed: u64) -> Self {
        Self::two_clusters(0.2, 500, seed)
    }

    /// Overlapping pair: covariance I.
    pub fn overlapping(seed: u64) -> Self {
        Self::two_clusters(1.0, 500, seed)
    }

    pub fn n_classes(&self) -> usize {
        self.centers.len()
    }

    pub fn dim(&self) -> usize {
        self.centers.first().map_or(0, Vec::len)
    }

    fn sigma(&self, class: usize) -> &[f64] {
        match &self.sigmas {
            Sigmas::Shared(s) => s,
            Sigmas::PerClass(s) => &s[class],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.n_classes();
        let d = self.dim();
        if k == 0 || d == 0 {
            return Err(Error::InvalidSpec("need at least one class and one dimension".into()));
        }
        if self.centers.iter().any(|c| c.len() != d || c.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidSpec("centers must be finite and share one dimension".into()));
        }
        if self.points_per_class.len() != k || self.points_per_class.contains(&0) {
            return Err(Error::InvalidSpec("need one positive point count per class".into()));
        }
        let rows: Vec<&Vec<f64>> = match &self.sigmas {
            Sigmas::Shared(s) => vec![s],
            Sigmas::PerClass(s) if s.len() == k => s.iter().collect(),
            Sigmas::PerClass(_) => {
                return Err(Error::InvalidSpec("need one sigma row per class".into()))
            }
        };
        if rows
            .iter()
            .any(|s| s.len() != d || s.iter().any(|v| !v.is_finite() || *v < 0.0))
        {
            return Err(Error::InvalidSpec("sigmas must be finite, non-negative, one per dimension".into()));
        }
        Ok(())
    }
}

fn sample_clusters<R: Rng>(
    rng: &mut R,
    centers: &Array2<f64>,
    sigma_of: impl Fn(usize) -> Array1<f64>,
    counts: &[usize],
) -> Result<LabeledDataset> {
    let d = centers.ncols();
    let n: usize = counts.iter().sum();
    let mut points = Array2::zeros((n, d));
    let mut labels = Vec::with_capacity(n);
    let mut row = 0;
    for (k, &count) in counts.iter().enumerate() {
        let sigma = sigma_of(k);
        for _ in 0..count {
            for j in 0..d {
                let z: f64 = rng.sample(StandardNormal);
                points[[row, j]] = centers[[k, j]] + sigma[j] * z;
            }
            labels.push(k as Label);
            row += 1;
        }
    }
    LabeledDataset::new(points, labels)
}

/// Samples every class around its center; labels are `0..K` in spec order.
pub fn generate_clusters(spec: &ClusterSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let k = spec.n_classes();
    let d = spec.dim();
    let centers = Array2::from_shape_fn((k, d), |(i, j)| spec.centers[i][j]);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    sample_clusters(
        &mut rng,
        &centers,
        |c| Array1::from(spec.sigma(c).to_vec()),
        &spec.points_per_class,
    )
}

/// Two classes laid out as a `grid × grid` checkerboard of Gaussian blobs with
/// unit spacing: blob `(i, j)` belongs to class `(i + j) mod 2`. Both classes
/// share the same mean and covariance, so they overlap completely at the
/// level of first and second moments while remaining separable by a
/// nonlinear classifier when `sigma` is small.
pub fn generate_checkerboard(grid: usize, sigma: f64, per_blob: usize, seed: u64) -> Result<LabeledDataset> {
    if grid < 2 || per_blob == 0 || !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidSpec("checkerboard needs grid >= 2, points per blob >= 1 and a finite sigma".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid * grid * per_blob;
    let mut points = Array2::zeros((n, 2));
    let mut labels = Vec::with_capacity(n);
    for b in 0..grid * grid {
        let (i, j) = (b / grid, b % grid);
        for _ in 0..per_blob {
            let row = labels.len();
            let zx: f64 = rng.sample(StandardNormal);
            let zy: f64 = rng.sample(StandardNormal);
            points[[row, 0]] = i as f64 + sigma * zx;
            points[[row, 1]] = j as f64 + sigma * zy;
            labels.push(((i + j) % 2) as Label);
        }
    }
    LabeledDataset::new(points, labels)
}

/// Maps 2-D points `(x, y)` to `(x, y, y)`.
pub fn embed_duplicate_y(data: &LabeledDataset) -> Result<LabeledDataset> {
    if data.n_dims() != 2 {
        return Err(Error::WrongDimension { expected: 2, found: data.n_dims() });
    }
    let x = data.points();
    let points = Array2::from_shape_fn((data.n_points(), 3), |(i, j)| x[[i, j.min(1)]]);
    data.with_points(points)
}

/// Embeds into `target_dim` dimensions by cycling through the original
/// columns: output column `j` is input column `j mod D`.
pub fn embed_replicate(data: &LabeledDataset, target_dim: usize) -> Result<LabeledDataset> {
    let d = data.n_dims();
    if target_dim < d {
        return Err(Error::WrongDimension { expected: d, found: target_dim });
    }
    let x = data.points();
    let points = Array2::from_shape_fn((data.n_points(), target_dim), |(i, j)| x[[i, j % d]]);
    data.with_points(points)
}

/// Maps every point `p` to `(p, p)`.
pub fn embed_full_duplicate(data: &LabeledDataset) -> Result<LabeledDataset> {
    embed_replicate(data, 2 * data.n_dims())
}

/// How the distance between two clusters is read when it is set to a
/// multiple of the cluster standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationMeasure {
    /// Distance between the two cluster centers.
    CenterDistance,
    /// Mean Euclidean distance over all cross-cluster point pairs.
    MeanPairwiseDistance,
}

/// Whether `sigma` is the per-coordinate standard deviation or the radial
/// one (`sigma / sqrt(dim)` per coordinate).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaConvention {
    PerDimension,
    Radial,
}

/// Outcome of [`two_cluster_separation_probe`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationProbe {
    pub measure: SeparationMeasure,
    pub convention: SigmaConvention,
    pub dim: usize,
    pub ratio: f64,
    pub center_distance: f64,
    pub mean_gdv: f64,
    pub std_gdv: f64,
    pub trials: usize,
}

/// Center distance at which the expected cross-cluster pair distance equals
/// `target`, for isotropic per-coordinate spread `s`. The expectation is
/// estimated on a fixed sample of pair differences and solved by bisection.
fn center_distance_for_pairwise(target: f64, s: f64, dim: usize, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, u64::MAX);
    let diffs: Vec<Vec<f64>> = (0..200_000)
        .map(|_| (0..dim).map(|_| s * std::f64::consts::SQRT_2 * rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    let mean_dist = |c: f64| {
        let shift = c / (dim as f64).sqrt();
        diffs.iter().map(|z| z.iter().map(|v| (v + shift).powi(2)).sum::<f64>().sqrt()).sum::<f64>() / diffs.len() as f64
    };
    if mean_dist(0.0) >= target {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, target);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mean_dist(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Monte Carlo GDV of two equal Gaussian clusters whose separation is
/// `ratio` times `sigma` under the given reading of "distance" and "sigma".
/// The second center lies on the main diagonal; trial `t` samples on ChaCha
/// stream `t` of `seed`.
pub fn two_cluster_separation_probe(
    measure: SeparationMeasure,
    convention: SigmaConvention,
    dim: usize,
    ratio: f64,
    per_class: usize,
    trials: usize,
    seed: u64,
) -> Result<SeparationProbe> {
    if dim == 0 || per_class < 2 || trials == 0 || !(ratio.is_finite() && ratio >= 0.0) {
        return Err(Error::InvalidSpec("probe needs dim >= 1, two points per class, one trial and a finite ratio".into()));
    }
    let sigma = 1.0;
    let per_dim = match convention {
        SigmaConvention::PerDimension => sigma,
        SigmaConvention::Radial => sigma / (dim as f64).sqrt(),
    };
    let center_distance = match measure {
        SeparationMeasure::CenterDistance => ratio * sigma,
        SeparationMeasure::MeanPairwiseDistance => center_distance_for_pairwise(ratio * sigma, per_dim, dim, seed),
    };
    let offset = center_distance / (dim as f64).sqrt();
    let centers = Array2::from_shape_fn((2, dim), |(k, _)| k as f64 * offset);
    let mut values = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = stream_rng(seed, t as u64);
        let data = sample_clusters(&mut rng, &centers, |_| Array1::from_elem(dim, per_dim), &[per_class, per_class])?;
        values.push(crate::metric::gdv(&data)?.gdv);
    }
    let n = values.len() as f64;
    let mean_gdv = values.iter().sum::<f64>() / n;
    let std_gdv = (values.iter().map(|v| (v - mean_gdv).powi(2)).sum::<f64>() / n).sqrt();
    Ok(SeparationProbe { measure, convention, dim, ratio, center_distance, mean_gdv, std_gdv, trials })
}

/// Random-ensemble parameters. Integer ranges are inclusive.
///
/// Each member draws its dimension count, class count and points-per-class
/// (one count shared by all classes) uniformly from the ranges, class
/// centers uniformly from `center_range` per coordinate, and one standard
/// deviation per class and dimension uniformly from `sigma_range`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_datasets: usize,
    pub dim_range: (usize, usize),
    pub class_range: (usize, usize),
    pub points_range: (usize, usize),
    pub center_range: (f64, f64),
    pub sigma_range: (f64, f64),
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_datasets: 10_000,
            dim_range: (2, 10),
            class_range: (2, 10),
            points_range: (1, 100),
            center_range: (0.0, 1.0),
            sigma_range: (0.0, 1.0),
            seed: 20_190_417,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        let int_ok = |(lo, hi): (usize, usize), min: usize| lo >= min && lo <= hi;
        let real_ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        if self.n_datasets == 0 {
            return Err(Error::InvalidSpec("n_datasets must be at least 1".into()));
        }
        if !int_ok(self.dim_range, 1) || !int_ok(self.class_range, 1) || !int_ok(self.points_range, 1) {
            return Err(Error::InvalidSpec("dimension, class and point ranges must be non-empty and positive".into()));
        }
        if !real_ok(self.center_range) || !real_ok(self.sigma_range) || self.sigma_range.0 < 0.0 {
            return Err(Error::InvalidSpec("center and sigma ranges must be finite, non-empty, sigma >= 0".into()));
        }
        Ok(())
    }

    /// Member `index`, generated from its own ChaCha stream.
    pub fn member(&self, index: usize) -> Result<EnsembleMember> {
        self.validate()?;
        let mut rng = stream_rng(self.seed, index as u64);
        let dim = rng.gen_range(self.dim_range.0..=self.dim_range.1);
        let classes = rng.gen_range(self.class_range.0..=self.class_range.1);
        let per_class = rng.gen_range(self.points_range.0..=self.points_range.1);
        let (c_lo, c_hi) = self.center_range;
        let centers = Array2::from_shape_fn((classes, dim), |_| c_lo + (c_hi - c_lo) * rng.gen::<f64>());
        let (s_lo, s_hi) = self.sigma_range;
        let sigmas = Array2::from_shape_fn((classes, dim), |_| s_lo + (s_hi - s_lo) * rng.gen::<f64>());
        let counts = vec![per_class; classes];
        let dataset = sample_clusters(&mut rng, &centers, |k| sigmas.row(k).to_owned(), &counts)?;
        Ok(EnsembleMember {
            index,
            dataset,
            points_per_class: per_class,
            has_singleton_class: per_class < 2,
        })
    }
}

/// One generated ensemble dataset. Members whose classes hold a single
/// point are flagged: their GDV is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub index: usize,
    pub dataset: LabeledDataset,
    pub points_per_class: usize,
    pub has_singleton_class: bool,
}

/// Lazily yields the `n_datasets` ensemble members in index order.
pub fn generate_ensemble(cfg: &EnsembleConfig) -> Result<impl Iterator<Item = Result<EnsembleMember>> + '_> {
    cfg.validate()?;
    Ok((0..cfg.n_datasets).map(move |k| cfg.member(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_puts_points_on_centers() {
        let spec = ClusterSpec::two_clusters(0.0, 5, 1);
        let ds = generate_clusters(&spec).unwrap();
        for (i, &l) in ds.labels().iter().enumerate() {
            let c = &spec.centers[l as usize];
            assert_eq!(ds.point(i).to_vec(), *c);
        }
    }

    #[test]
    fn same_seed_same_data() {
        let a = generate_clusters(&ClusterSpec::separated(42)).unwrap();
        let b = generate_clusters(&ClusterSpec::separated(42)).unwrap();
        assert_eq!(a, b);
        let c = generate_clusters(&ClusterSpec::separated(43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn separated_spec_shape() {
        let ds = generate_clusters(&ClusterSpec::separated(42)).unwrap();
        assert_eq!((ds.n_points(), ds.n_dims()), (1000, 2));
        assert_eq!(ds.n_classes(), 2);
    }

    #[test]
    fn invalid_specs() {
        let mut s = ClusterSpec::separated(0);
        s.points_per_class[1] = 0;
        assert!(matches!(generate_clusters(&s), Err(Error::InvalidSpec(_))));
        let mut s = ClusterSpec::separated(0);
        s.sigmas = Sigmas::Shared(vec![-1.0, 0.1]);
        assert!(matches!(generate_clusters(&s), Err(Error::InvalidSpec(_))));
        let mut s = ClusterSpec::separated(0);
        s.centers[1].push(3.0);
        assert!(matches!(generate_clusters(&s), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn duplicate_y() {
        let ds = LabeledDataset::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]], vec![0, 1]).unwrap();
        let e = embed_duplicate_y(&ds).unwrap();
        assert_eq!(e.point(0).to_vec(), vec![1.0, 2.0, 2.0]);
        assert_eq!(e.labels(), ds.labels());
        let one_d = LabeledDataset::from_rows(&[vec![1.0], vec![3.0]], vec![0, 1]).unwrap();
        assert!(matches!(
            embed_duplicate_y(&one_d),
            Err(Error::WrongDimension { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn ensemble_member_shape_from_ranges() {
        let cfg = EnsembleConfig {
            n_datasets: 1,
            dim_range: (2, 2),
            class_range: (2, 2),
            ..Default::default()
        };
        let members: Vec<_> = generate_ensemble(&cfg).unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(members.len(), 1);
        assert_eq!(members[0].dataset.n_dims(), 2);
        assert_eq!(members[0].dataset.n_classes(), 2);
    }

    #[test]
    fn singleton_classes_are_flagged() {
        let cfg = EnsembleConfig { n_datasets: 5, points_range: (1, 1), ..Default::default() };
        for m in generate_ensemble(&cfg).unwrap() {
            let m = m.unwrap();
            assert!(m.has_singleton_class);
            assert!(matches!(crate::metric::gdv(&m.dataset), Err(Error::ClassTooSmall { .. })));
        }
    }

    #[test]
    fn member_is_random_access() {
        let cfg = EnsembleConfig { n_datasets: 8, ..Default::default() };
        let all: Vec<_> = generate_ensemble(&cfg).unwrap().map(|m| m.unwrap()).collect();
        assert_eq!(cfg.member(5).unwrap(), all[5]);
    }

    #[test]
    fn invalid_ensemble_config() {
        let cfg = EnsembleConfig { dim_range: (5, 2), ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::InvalidSpec(_))));
        let cfg = EnsembleConfig { n_datasets: 0, ..Default::default() };
        assert!(generate_ensemble(&cfg).is_err());
    }

    #[test]
    fn separation_probe_readings() {
        let p = two_cluster_separation_probe(SeparationMeasure::CenterDistance, SigmaConvention::Radial, 2, 2.0, 100, 3, 1).unwrap();
        assert_eq!(p.center_distance, 2.0);
        assert!(p.mean_gdv < -0.2 && p.mean_gdv > -0.5);
        let q = two_cluster_separation_probe(SeparationMeasure::MeanPairwiseDistance, SigmaConvention::PerDimension, 1, 2.0, 100, 3, 1).unwrap();
        assert!(q.center_distance > 1.8 && q.center_distance < 1.95);
        assert!(two_cluster_separation_probe(SeparationMeasure::CenterDistance, SigmaConvention::Radial, 0, 2.0, 100, 3, 1).is_err());
    }
}
