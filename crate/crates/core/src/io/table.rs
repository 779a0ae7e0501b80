use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::dataset::{Label, LabeledDataset};
use crate::error::{Error, Result};

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Reads a CSV whose last column is `label`; every other column is a coordinate.
///
/// Row and column numbers in errors are zero-based and count data rows only.
pub fn load_labeled_csv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.len() < 2 || headers.iter().next_back() != Some("label") {
        return Err(Error::MissingLabelColumn);
    }
    let d = headers.len() - 1;
    let mut values = Vec::new();
    let mut labels: Vec<Label> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { .. } => Error::Parse {
                row,
                col: 0,
                msg: format!("expected {} fields", d + 1),
            },
            _ => csv_error(path, e),
        })?;
        for (col, cell) in record.iter().take(d).enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                col,
                msg: format!("not a number: {cell:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { row, col });
            }
            values.push(v);
        }
        let cell = &record[d];
        labels.push(cell.parse().map_err(|_| Error::Parse {
            row,
            col: d,
            msg: format!("label must be a non-negative integer: {cell:?}"),
        })?);
    }
    let n = labels.len();
    let points = Array2::from_shape_vec((n, d), values).map_err(|e| Error::InvalidDataset(e.to_string()))?;
    LabeledDataset::new(points, labels)
}

/// Writes `x0,...,x{D-1},label` with 17 significant digits per coordinate.
pub fn save_labeled_csv(path: impl AsRef<Path>, data: &LabeledDataset) -> Result<()> {
    let path = path.as_ref();
    let mut out = super::create(path)?;
    let io = |e| Error::io(path, e);
    let header: Vec<String> = (0..data.n_dims()).map(|j| format!("x{j}")).collect();
    writeln!(out, "{},label", header.join(",")).map_err(io)?;
    for (row, label) in data.points().rows().into_iter().zip(data.labels()) {
        let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(out, "{},{label}", cells.join(",")).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Writes a 2-D projection as `x,y,label`.
pub fn save_projection_csv(path: impl AsRef<Path>, projection: &crate::projection::Projection2D) -> Result<()> {
    let path = path.as_ref();
    let mut out = super::create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(out, "x,y,label").map_err(io)?;
    for (row, label) in projection.coords.rows().into_iter().zip(&projection.labels) {
        writeln!(out, "{},{},{label}", fmt_f64(row[0]), fmt_f64(row[1])).map_err(io)?;
    }
    out.flush().map_err(io)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse { row: 0, col: 0, msg: format!("{other:?}") },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, text: &str) -> std::path::PathBuf {
        let p = dir.path().join("d.csv");
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn loads_two_rows() {
        let dir = tempfile::tempdir().unwrap();
        let ds = load_labeled_csv(write(&dir, "x0,x1,label\n0,0,0\n1,1,1")).unwrap();
        assert_eq!((ds.n_points(), ds.n_dims()), (2, 2));
        assert_eq!(ds.labels(), &[0, 1]);
    }

    #[test]
    fn nan_is_reported_with_coordinates() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_labeled_csv(write(&dir, "a,b,label\n0,1,0\n2,NaN,1\n")).unwrap_err();
        assert!(matches!(err, Error::NonFiniteValue { row: 1, col: 1 }));
    }

    #[test]
    fn missing_label_column() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_labeled_csv(write(&dir, "a,b\n0,1\n")).unwrap_err();
        assert!(matches!(err, Error::MissingLabelColumn));
    }

    #[test]
    fn bad_cell_and_bad_label() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_labeled_csv(write(&dir, "a,label\n0,0\nzz,1\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, col: 0, .. }));
        let err = load_labeled_csv(write(&dir, "a,label\n0,-1\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 0, col: 1, .. }));
        let err = load_labeled_csv(write(&dir, "a,label\n0,1,2\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 0, .. }));
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rt.csv");
        let ds = LabeledDataset::from_rows(
            &[vec![0.1, -1.0 / 3.0, 1e-300], vec![f64::MAX, 2.5e17, -0.0]],
            vec![4, 0],
        )
        .unwrap();
        save_labeled_csv(&p, &ds).unwrap();
        assert_eq!(load_labeled_csv(&p).unwrap(), ds);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_labeled_csv("/nonexistent/x.csv").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
