//! Class separability of labeled point sets, measured by the generalized
//! discrimination value (GDV), plus the synthetic data, random-transform
//! experiments, MDS projection and file formats built around it.

pub mod dataset;
pub mod error;
pub mod metric;
pub mod synthetic;

pub use dataset::{Label, LabeledDataset};
pub use error::{Error, ErrorClass, Result};
pub use metric::{gdv, gdv_curve, gdv_with, GdvCurve, GdvOptions, GdvReport, Metric};
pub mod io;
pub mod projection;
pub mod transform;
