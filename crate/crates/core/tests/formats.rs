use gdv_core::io::{self, ActivationArchive};
use gdv_core::synthetic::{generate_clusters, ClusterSpec};
use gdv_core::{gdv, gdv_curve};

#[test]
fn csv_round_trip_preserves_every_bit() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate_clusters(&ClusterSpec::overlapping(2)).unwrap();
    let path = dir.path().join("points.csv");
    io::save_labeled_csv(&path, &data).unwrap();
    let back = io::load_labeled_csv(&path).unwrap();
    assert_eq!(back.points(), data.points());
    assert_eq!(back.labels(), data.labels());
}

#[test]
fn archive_round_trip_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let a = generate_clusters(&ClusterSpec::separated(1)).unwrap();
    let b = a.with_points(a.points().mapv(|v| (v * 4.0).round() / 4.0) ).unwrap();
    let layers = vec![("input".to_string(), a.clone()), ("hidden_1".to_string(), b)];
    let archive = ActivationArchive::from_datasets(&layers, "unit test").unwrap();
    let path = dir.path().join("acts.gdva");
    io::write_activation_archive(&path, &archive).unwrap();
    let back = io::read_activation_archive(&path).unwrap();
    assert_eq!(back, archive);
    let curve = gdv_curve(&back.to_datasets().unwrap()).unwrap();
    assert_eq!(curve.len(), 2);
    let expected = gdv(&a.with_points(a.points().mapv(|v| v as f32 as f64)).unwrap()).unwrap().gdv;
    assert_eq!(curve.get(0), Some(expected));
}

#[test]
fn report_json_and_curve_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate_clusters(&ClusterSpec::separated(3)).unwrap();
    let report = gdv(&data).unwrap();
    let rp = dir.path().join("r.json");
    io::write_report_json(&rp, &report).unwrap();
    assert_eq!(io::read_report_json(&rp).unwrap(), report);

    let dead = data.with_points(data.points().mapv(|_| 0.0)).unwrap();
    let curve = gdv_curve(&[("a".into(), data), ("b".into(), dead)]).unwrap();
    let cp = dir.path().join("c.csv");
    io::write_curve_csv(&cp, &curve).unwrap();
    let back = io::report::read_curve_csv(&cp).unwrap();
    assert_eq!(back.values(), curve.values());
    assert_eq!(back.values()[1], None);
}

#[test]
fn idx_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let images = ndarray::Array2::from_shape_fn((3, 4), |(i, j)| ((i * 4 + j) * 17 % 256) as f64 / 255.0);
    let labels = vec![7, 0, 3];
    let ip = dir.path().join("img-idx3-ubyte");
    let lp = dir.path().join("lab-idx1-ubyte");
    std::fs::write(&ip, io::idx::encode_idx_images(&images, 2, 2)).unwrap();
    std::fs::write(&lp, io::idx::encode_idx_labels(&labels)).unwrap();
    let back = io::load_mnist(&ip, &lp).unwrap();
    assert_eq!(back.points(), &images);
    assert_eq!(back.labels(), labels.as_slice());
}
