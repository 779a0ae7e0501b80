//! MNIST IDX files: big-endian magic and sizes, unsigned byte payload.
//! Gzipped files (`*.gz`, as distributed) are inflated transparently.

use std::path::Path;

use ndarray::Array2;

use super::{read_bytes, ByteReader};
use crate::dataset::{Label, LabeledDataset};
use crate::error::{Error, Result};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

/// Images flattened row-major to `N × (rows·cols)`, pixel bytes scaled by 1/255.
pub fn parse_idx_images(bytes: &[u8]) -> Result<Array2<f64>> {
    let mut r = ByteReader::new(bytes);
    let magic = r.u32_be()?;
    if magic != IMAGES_MAGIC {
        return Err(Error::BadMagic { expected: IMAGES_MAGIC, found: magic });
    }
    let n = r.u32_be()? as usize;
    let rows = r.u32_be()? as usize;
    let cols = r.u32_be()? as usize;
    let size = n
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or_else(|| Error::DimensionMismatch("image dimensions overflow".into()))?;
    let payload = r.take(size)?;
    let pixels = payload.iter().map(|&b| f64::from(b) / 255.0).collect();
    Array2::from_shape_vec((n, rows * cols), pixels).map_err(|e| Error::DimensionMismatch(e.to_string()))
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<Label>> {
    let mut r = ByteReader::new(bytes);
    let magic = r.u32_be()?;
    if magic != LABELS_MAGIC {
        return Err(Error::BadMagic { expected: LABELS_MAGIC, found: magic });
    }
    let n = r.u32_be()? as usize;
    Ok(r.take(n)?.iter().map(|&b| Label::from(b)).collect())
}

pub fn load_idx_images(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    parse_idx_images(&read_bytes(path.as_ref())?)
}

pub fn load_idx_labels(path: impl AsRef<Path>) -> Result<Vec<Label>> {
    parse_idx_labels(&read_bytes(path.as_ref())?)
}

/// Pairs an image file with its label file.
pub fn load_mnist(images: impl AsRef<Path>, labels: impl AsRef<Path>) -> Result<LabeledDataset> {
    let x = load_idx_images(images)?;
    let y = load_idx_labels(labels)?;
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!("{} images but {} labels", x.nrows(), y.len())));
    }
    LabeledDataset::new(x, y)
}

/// Encodes images (values in [0,1], rounded to bytes) as an IDX image file.
pub fn encode_idx_images(images: &Array2<f64>, rows: usize, cols: usize) -> Vec<u8> {
    assert_eq!(images.ncols(), rows * cols);
    let mut out = Vec::with_capacity(16 + images.len());
    for v in [IMAGES_MAGIC, images.nrows() as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend(images.iter().map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

pub fn encode_idx_labels(labels: &[Label]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend(labels.iter().map(|&l| l as u8));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_images() -> Vec<u8> {
        let mut b = Vec::new();
        for v in [IMAGES_MAGIC, 2, 2, 2] {
            b.extend_from_slice(&v.to_be_bytes());
        }
        b.extend_from_slice(&[0, 255, 51, 102, 1, 2, 3, 4]);
        b
    }

    #[test]
    fn parses_images() {
        let x = parse_idx_images(&tiny_images()).unwrap();
        assert_eq!(x.dim(), (2, 4));
        assert_eq!(x[[0, 1]], 1.0);
        assert_eq!(x[[0, 0]], 0.0);
        assert_eq!(x[[0, 2]], 0.2);
    }

    #[test]
    fn bad_magic() {
        let mut b = tiny_images();
        b[3] = 0x01;
        assert!(matches!(
            parse_idx_images(&b),
            Err(Error::BadMagic { expected: IMAGES_MAGIC, found: 0x801 })
        ));
        assert!(matches!(parse_idx_labels(&tiny_images()), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn truncated_payload() {
        let b = tiny_images();
        assert!(matches!(parse_idx_images(&b[..b.len() - 1]), Err(Error::TruncatedFile { .. })));
        assert!(matches!(parse_idx_images(&b[..6]), Err(Error::TruncatedFile { .. })));
        // Header declares far more rows than present: rejected before allocation.
        let mut huge = tiny_images();
        huge[4..8].copy_from_slice(&u32::MAX.to_be_bytes());
        assert!(matches!(parse_idx_images(&huge), Err(Error::TruncatedFile { .. })));
    }

    #[test]
    fn labels_round_trip() {
        let labels = vec![0, 9, 3, 3];
        assert_eq!(parse_idx_labels(&encode_idx_labels(&labels)).unwrap(), labels);
    }

    #[test]
    fn mismatched_counts() {
        let dir = tempfile::tempdir().unwrap();
        let (pi, pl) = (dir.path().join("i"), dir.path().join("l"));
        std::fs::write(&pi, tiny_images()).unwrap();
        std::fs::write(&pl, encode_idx_labels(&[1, 2, 3])).unwrap();
        assert!(matches!(load_mnist(&pi, &pl), Err(Error::DimensionMismatch(_))));
        std::fs::write(&pl, encode_idx_labels(&[1, 2])).unwrap();
        assert_eq!(load_mnist(&pi, &pl).unwrap().n_points(), 2);
    }
}
