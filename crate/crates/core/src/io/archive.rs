//! `GDVA` activation archives.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "GDVA"  u32 version (=1)  u32 layer_count
//! per layer: u32 id_len, id (UTF-8), u32 rows, u32 cols, rows*cols f32 (row-major)
//! u32 label_count, label_count u32 labels
//! optional: u32 text_len, provenance (UTF-8)
//! ```
//!
//! The trailing provenance block may be absent; it then reads as empty.

use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use super::{read_bytes, ByteReader};
use crate::dataset::{Label, LabeledDataset};
use crate::error::{Error, Result};

pub const ARCHIVE_MAGIC: [u8; 4] = *b"GDVA";
pub const ARCHIVE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerRecord {
    pub layer_id: String,
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows × cols` values.
    pub values: Vec<f32>,
}

impl LayerRecord {
    pub fn from_matrix(layer_id: impl Into<String>, m: &Array2<f64>) -> Self {
        Self {
            layer_id: layer_id.into(),
            rows: m.nrows(),
            cols: m.ncols(),
            values: m.iter().map(|&v| v as f32).collect(),
        }
    }

    pub fn to_matrix(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.rows, self.cols), |(i, j)| f64::from(self.values[i * self.cols + j]))
    }
}

/// Per-layer activations of one probe set, sharing one label vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActivationArchive {
    pub layers: Vec<LayerRecord>,
    pub labels: Vec<Label>,
    pub provenance: String,
}

impl ActivationArchive {
    pub fn validate(&self) -> Result<()> {
        for l in &self.layers {
            if l.values.len() != l.rows * l.cols {
                return Err(Error::DimensionMismatch(format!(
                    "layer {:?}: {} values for {}x{}",
                    l.layer_id,
                    l.values.len(),
                    l.rows,
                    l.cols
                )));
            }
            if l.rows != self.labels.len() {
                return Err(Error::DimensionMismatch(format!(
                    "layer {:?} has {} rows but there are {} labels",
                    l.layer_id,
                    l.rows,
                    self.labels.len()
                )));
            }
        }
        Ok(())
    }

    /// One labeled dataset per layer, widened to `f64`.
    pub fn to_datasets(&self) -> Result<Vec<(String, LabeledDataset)>> {
        self.layers
            .iter()
            .map(|l| Ok((l.layer_id.clone(), LabeledDataset::new(l.to_matrix(), self.labels.clone())?)))
            .collect()
    }

    pub fn from_datasets(layers: &[(String, LabeledDataset)], provenance: impl Into<String>) -> Result<Self> {
        let labels = layers.first().map(|(_, d)| d.labels().to_vec()).unwrap_or_default();
        let archive = Self {
            layers: layers.iter().map(|(id, d)| LayerRecord::from_matrix(id.clone(), d.points())).collect(),
            labels,
            provenance: provenance.into(),
        };
        archive.validate()?;
        Ok(archive)
    }
}

pub fn encode_archive(archive: &ActivationArchive) -> Result<Vec<u8>> {
    archive.validate()?;
    let mut out = Vec::new();
    out.extend_from_slice(&ARCHIVE_MAGIC);
    out.extend_from_slice(&ARCHIVE_VERSION.to_le_bytes());
    out.extend_from_slice(&(archive.layers.len() as u32).to_le_bytes());
    for l in &archive.layers {
        out.extend_from_slice(&(l.layer_id.len() as u32).to_le_bytes());
        out.extend_from_slice(l.layer_id.as_bytes());
        out.extend_from_slice(&(l.rows as u32).to_le_bytes());
        out.extend_from_slice(&(l.cols as u32).to_le_bytes());
        for v in &l.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out.extend_from_slice(&(archive.labels.len() as u32).to_le_bytes());
    for l in &archive.labels {
        out.extend_from_slice(&l.to_le_bytes());
    }
    out.extend_from_slice(&(archive.provenance.len() as u32).to_le_bytes());
    out.extend_from_slice(archive.provenance.as_bytes());
    Ok(out)
}

fn utf8(bytes: &[u8]) -> Result<String> {
    String::from_utf8(bytes.to_vec()).map_err(|e| Error::Parse { row: 0, col: 0, msg: e.to_string() })
}

pub fn decode_archive(bytes: &[u8]) -> Result<ActivationArchive> {
    let mut r = ByteReader::new(bytes);
    let magic = r.take(4)?;
    if magic != ARCHIVE_MAGIC {
        return Err(Error::BadMagic {
            expected: u32::from_be_bytes(ARCHIVE_MAGIC),
            found: u32::from_be_bytes(magic.try_into().expect("4 bytes")),
        });
    }
    let version = r.u32_le()?;
    if version != ARCHIVE_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let n_layers = r.u32_le()? as usize;
    let mut layers = Vec::new();
    for _ in 0..n_layers {
        let id_len = r.u32_le()? as usize;
        let layer_id = utf8(r.take(id_len)?)?;
        let rows = r.u32_le()? as usize;
        let cols = r.u32_le()? as usize;
        let count = rows.checked_mul(cols).and_then(|c| c.checked_mul(4)).ok_or(Error::TruncatedFile {
            offset: 0,
            needed: usize::MAX,
            available: r.remaining(),
        })?;
        r.require(count)?;
        let mut values = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            values.push(r.f32_le()?);
        }
        layers.push(LayerRecord { layer_id, rows, cols, values });
    }
    let n_labels = r.u32_le()? as usize;
    r.require(n_labels.saturating_mul(4))?;
    let labels = (0..n_labels).map(|_| r.u32_le()).collect::<Result<Vec<_>>>()?;
    let provenance = if r.remaining() == 0 {
        String::new()
    } else {
        let len = r.u32_le()? as usize;
        utf8(r.take(len)?)?
    };
    let archive = ActivationArchive { layers, labels, provenance };
    archive.validate()?;
    Ok(archive)
}

pub fn write_activation_archive(path: impl AsRef<Path>, archive: &ActivationArchive) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_archive(archive)?;
    let mut f = super::create(path)?;
    f.write_all(&bytes).and_then(|_| f.flush()).map_err(|e| Error::io(path, e))
}

pub fn read_activation_archive(path: impl AsRef<Path>) -> Result<ActivationArchive> {
    decode_archive(&read_bytes(path.as_ref())?)
}
