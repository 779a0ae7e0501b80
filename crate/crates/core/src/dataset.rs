use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView1, Axis};

use crate::error::{Error, Result};

/// Class identifier attached to every point.
pub type Label = u32;

/// `N` points in `D` dimensions, each carrying an integer class label.
///
/// Construction validates the shape and rejects non-finite coordinates, so
/// every `LabeledDataset` in circulation satisfies `N >= 1`, `D >= 1` and
/// `labels.len() == N`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    points: Array2<f64>,
    labels: Vec<Label>,
    class_names: Option<BTreeMap<Label, String>>,
}

impl LabeledDataset {
    pub fn new(points: Array2<f64>, labels: Vec<Label>) -> Result<Self> {
        let (n, d) = points.dim();
        if n == 0 || d == 0 {
            return Err(Error::InvalidDataset(format!("empty point matrix ({n}x{d})")));
        }
        if labels.len() != n {
            return Err(Error::InvalidDataset(format!(
                "{} labels for {n} points",
                labels.len()
            )));
        }
        if let Some(((row, col), _)) = points.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue { row, col });
        }
        Ok(Self { points, labels, class_names: None })
    }

    /// Builds a dataset from row vectors. All rows must share one length.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<Label>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::InvalidDataset(format!("row {bad} has a different width")));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let points = Array2::from_shape_vec((rows.len(), d), flat)
            .map_err(|e| Error::InvalidDataset(e.to_string()))?;
        Self::new(points, labels)
    }

    pub fn with_class_names(mut self, names: BTreeMap<Label, String>) -> Self {
        self.class_names = Some(names);
        self
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn class_names(&self) -> Option<&BTreeMap<Label, String>> {
        self.class_names.as_ref()
    }

    pub fn n_points(&self) -> usize {
        self.points.nrows()
    }

    pub fn n_dims(&self) -> usize {
        self.points.ncols()
    }

    pub fn point(&self, i: usize) -> ArrayView1<'_, f64> {
        self.points.row(i)
    }

    /// Point indices per class, classes in ascending id order and indices ascending.
    pub fn class_members(&self) -> BTreeMap<Label, Vec<usize>> {
        let mut members: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
        for (i, &l) in self.labels.iter().enumerate() {
            members.entry(l).or_default().push(i);
        }
        members
    }

    pub fn n_classes(&self) -> usize {
        self.class_members().len()
    }

    /// Replaces the coordinates, keeping the labels.
    pub fn with_points(&self, points: Array2<f64>) -> Result<Self> {
        let mut out = Self::new(points, self.labels.clone())?;
        out.class_names = self.class_names.clone();
        Ok(out)
    }

    /// Replaces the labels, keeping the coordinates.
    pub fn with_labels(&self, labels: Vec<Label>) -> Result<Self> {
        let mut out = Self::new(self.points.clone(), labels)?;
        out.class_names = self.class_names.clone();
        Ok(out)
    }

    /// Rows at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let points = self.points.select(Axis(0), indices);
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        let mut out = Self::new(points, labels)?;
        out.class_names = self.class_names.clone();
        Ok(out)
    }

    /// Keeps only points whose label is in `classes`, preserving order.
    pub fn filter_classes(&self, classes: &[Label]) -> Result<Self> {
        let idx: Vec<usize> = (0..self.n_points())
            .filter(|&i| classes.contains(&self.labels[i]))
            .collect();
        self.select(&idx)
    }
}
