use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the metric, the generators and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("InvalidDataset: {0}")]
    InvalidDataset(String),
    #[error("AllDimensionsConstant: every input dimension has zero variance")]
    AllDimensionsConstant,
    #[error("ClassTooSmall: class {} has {size} point(s), at least 2 are required", fmt_class(.class))]
    ClassTooSmall { class: Option<u32>, size: usize },
    #[error("EmptyClass: a point set passed to the inter-class distance is empty")]
    EmptyClass,
    #[error("SingleClass: {found} distinct label(s), at least 2 are required")]
    SingleClass { found: usize },
    #[error("LabelMismatch: layer {layer} does not share the label vector of layer 0")]
    LabelMismatch { layer: usize },
    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),
    #[error("WrongDimension: expected {expected} dimension(s), found {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("TooFewPoints: {found} point(s), at least {required} are required")]
    TooFewPoints { found: usize, required: usize },
    #[error("DegenerateSpectrum: top eigenvalue {0:e} is not positive")]
    DegenerateSpectrum(f64),
    #[error("EigenNoConvergence: residual {residual:e} after {iterations} iterations")]
    EigenNoConvergence { iterations: usize, residual: f64 },
    #[error("ParseError at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },
    #[error("NonFiniteValue at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },
    #[error("MissingLabelColumn: last header column must be named \"label\"")]
    MissingLabelColumn,
    #[error("BadMagic: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { expected: u32, found: u32 },
    #[error("UnsupportedVersion: {0}")]
    UnsupportedVersion(u32),
    #[error("TruncatedFile: needed {needed} bytes at offset {offset}, {available} available")]
    TruncatedFile { offset: usize, needed: usize, available: usize },
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    #[error("IoError on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse failure classes, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Io,
    Validation,
    Numeric,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Short variant name, e.g. `"SingleClass"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidDataset(_) => "InvalidDataset",
            Error::AllDimensionsConstant => "AllDimensionsConstant",
            Error::ClassTooSmall { .. } => "ClassTooSmall",
            Error::EmptyClass => "EmptyClass",
            Error::SingleClass { .. } => "SingleClass",
            Error::LabelMismatch { .. } => "LabelMismatch",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::WrongDimension { .. } => "WrongDimension",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::DegenerateSpectrum(_) => "DegenerateSpectrum",
            Error::EigenNoConvergence { .. } => "EigenNoConvergence",
            Error::Parse { .. } => "ParseError",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::MissingLabelColumn => "MissingLabelColumn",
            Error::BadMagic { .. } => "BadMagic",
            Error::UnsupportedVersion(_) => "UnsupportedVersion",
            Error::TruncatedFile { .. } => "TruncatedFile",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::Io { .. } => "IoError",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } => ErrorClass::Io,
            Error::EigenNoConvergence { .. } => ErrorClass::Numeric,
            _ => ErrorClass::Validation,
        }
    }
}

fn fmt_class(class: &Option<u32>) -> String {
    class.map_or_else(|| "<unnamed>".to_string(), |c| c.to_string())
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
