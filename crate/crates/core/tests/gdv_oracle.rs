//! The library GDV checked against a direct, loop-by-loop evaluation and
//! against the invariances the measure is expected to have.

use gdv_core::{gdv, Label, LabeledDataset};
use proptest::prelude::*;

/// Straightforward evaluation: z-score with population deviation, halve,
/// drop flat columns, then average distances over explicit pair loops.
fn oracle(points: &[Vec<f64>], labels: &[Label]) -> f64 {
    let n = points.len();
    let d = points[0].len();
    let mut cols = Vec::new();
    for j in 0..d {
        let mean = points.iter().map(|p| p[j]).sum::<f64>() / n as f64;
        let var = points.iter().map(|p| (p[j] - mean).powi(2)).sum::<f64>() / n as f64;
        if var > 0.0 {
            cols.push((j, mean, var.sqrt()));
        }
    }
    let s: Vec<Vec<f64>> = points
        .iter()
        .map(|p| cols.iter().map(|&(j, m, sd)| 0.5 * (p[j] - m) / sd).collect())
        .collect();
    let dist = |a: usize, b: usize| s[a].iter().zip(&s[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();

    let mut classes: Vec<Label> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let members = |c: Label| (0..n).filter(|&i| labels[i] == c).collect::<Vec<_>>();

    let mut intra = 0.0;
    for &c in &classes {
        let m = members(c);
        let mut sum = 0.0;
        for a in 0..m.len() {
            for b in a + 1..m.len() {
                sum += dist(m[a], m[b]);
            }
        }
        intra += 2.0 * sum / (m.len() * (m.len() - 1)) as f64;
    }
    let l = classes.len() as f64;
    let mut inter = 0.0;
    for x in 0..classes.len() {
        for y in x + 1..classes.len() {
            let (ma, mb) = (members(classes[x]), members(classes[y]));
            let sum: f64 = ma.iter().flat_map(|&i| mb.iter().map(move |&j| (i, j))).map(|(i, j)| dist(i, j)).sum();
            inter += sum / (ma.len() * mb.len()) as f64;
        }
    }
    (intra / l - 2.0 * inter / (l * (l - 1.0))) / (cols.len() as f64).sqrt()
}

fn dataset(points: &[Vec<f64>], labels: &[Label]) -> LabeledDataset {
    LabeledDataset::from_rows(points, labels.to_vec()).unwrap()
}

/// Random labeled data with 2 to 4 classes of at least 2 points each.
fn labeled_points() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Label>)> {
    (1usize..6, 2usize..5, 2usize..8).prop_flat_map(|(d, k, per)| {
        let n = k * per;
        (
            prop::collection::vec(prop::collection::vec(-50.0f64..50.0, d), n),
            Just((0..n).map(|i| (i % k) as Label).collect::<Vec<_>>()),
        )
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn hand_examples() {
    let g = gdv(&dataset(&[vec![0.0], vec![0.0], vec![1.0], vec![1.0]], &[0, 0, 1, 1])).unwrap();
    assert!((g.gdv + 1.0).abs() < 1e-12);
    assert_eq!(g.effective_dim, 1);
    let err = gdv(&dataset(&[vec![0.0], vec![1.0]], &[3, 3])).unwrap_err();
    assert_eq!(err.name(), "SingleClass");
}

#[test]
fn flat_column_is_ignored() {
    let pts = [vec![0.0, 7.0], vec![0.1, 7.0], vec![1.0, 7.0], vec![1.2, 7.0]];
    let with = gdv(&dataset(&pts, &[0, 0, 1, 1])).unwrap();
    let without: Vec<Vec<f64>> = pts.iter().map(|p| vec![p[0]]).collect();
    assert_eq!(with.gdv, gdv(&dataset(&without, &[0, 0, 1, 1])).unwrap().gdv);
    assert_eq!(with.dropped_dims, vec![1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_direct_evaluation((pts, labels) in labeled_points()) {
        let Ok(r) = gdv(&dataset(&pts, &labels)) else { return Ok(()) };
        prop_assert!(close(r.gdv, oracle(&pts, &labels), 1e-10));
        prop_assert!((r.recompute() - r.gdv).abs() <= 1e-12);
    }

    #[test]
    fn translation_and_affine((pts, labels) in labeled_points(), shift in -100.0f64..100.0, scale in 0.1f64..10.0, flip in any::<bool>()) {
        let Ok(base) = gdv(&dataset(&pts, &labels)) else { return Ok(()) };
        let a = if flip { -scale } else { scale };
        let moved: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().enumerate().map(|(j, v)| if j == 0 { a * v + shift } else { v + shift }).collect()).collect();
        prop_assert!((gdv(&dataset(&moved, &labels)).unwrap().gdv - base.gdv).abs() < 1e-9);
    }

    #[test]
    fn column_permutation_and_relabel((pts, labels) in labeled_points(), offset in 1u32..1000) {
        // Relabeling is bit-exact; reordering columns reorders each
        // per-pair sum over dimensions, so it holds to rounding only.
        let Ok(base) = gdv(&dataset(&pts, &labels)) else { return Ok(()) };
        let rev: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().rev().copied().collect()).collect();
        prop_assert!((gdv(&dataset(&rev, &labels)).unwrap().gdv - base.gdv).abs() <= 1e-12);
        let max = *labels.iter().max().unwrap();
        let renamed: Vec<Label> = labels.iter().map(|&l| (max - l) * 7 + offset).collect();
        prop_assert_eq!(gdv(&dataset(&pts, &renamed)).unwrap().gdv, base.gdv);
    }

    #[test]
    fn row_order((pts, labels) in labeled_points(), rot in 0usize..64) {
        let Ok(base) = gdv(&dataset(&pts, &labels)) else { return Ok(()) };
        let k = rot % pts.len();
        let mut p2 = pts.clone();
        let mut l2 = labels.clone();
        p2.rotate_left(k);
        l2.rotate_left(k);
        p2.reverse();
        l2.reverse();
        prop_assert!((gdv(&dataset(&p2, &l2)).unwrap().gdv - base.gdv).abs() < 1e-12);
    }

    #[test]
    fn full_duplication((pts, labels) in labeled_points()) {
        let Ok(base) = gdv(&dataset(&pts, &labels)) else { return Ok(()) };
        let dup: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().chain(p.iter()).copied().collect()).collect();
        prop_assert!((gdv(&dataset(&dup, &labels)).unwrap().gdv - base.gdv).abs() < 1e-9);
    }
}

#[test]
fn shuffled_labels_average_to_zero() {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let data = gdv_core::synthetic::generate_clusters(&gdv_core::synthetic::ClusterSpec::two_clusters(0.3, 1000, 5)).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut labels = data.labels().to_vec();
    let mut sum = 0.0;
    for _ in 0..50 {
        labels.shuffle(&mut rng);
        let g = gdv(&data.with_labels(labels.clone()).unwrap()).unwrap().gdv;
        assert!(g.abs() < 0.02, "single shuffle gave {g}");
        sum += g;
    }
    assert!((sum / 50.0).abs() < 0.01);
}

#[test]
fn parallel_pool_sizes_agree() {
    let data = gdv_core::synthetic::generate_clusters(&gdv_core::synthetic::ClusterSpec::overlapping(3)).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| gdv(&data).unwrap().gdv)
    };
    let one = run(1);
    for t in [2, 3, 8] {
        assert!((run(t) - one).abs() <= 1e-9 * one.abs());
    }
}
