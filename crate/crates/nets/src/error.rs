use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("ShapeMismatch: {what}: expected {expected}, found {found}")]
    ShapeMismatch { what: &'static str, expected: usize, found: usize },
    #[error("NonFiniteLoss: training diverged in epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
    #[error("LayerOutOfRange: layer {layer} requested, network depth is {depth}")]
    LayerOutOfRange { layer: usize, depth: usize },
    #[error("NoClassImages: no test image of class {0}")]
    NoClassImages(u32),
    #[error(transparent)]
    Core(#[from] gdv_core::Error),
}

impl NetError {
    pub fn name(&self) -> &'static str {
        match self {
            NetError::ShapeMismatch { .. } => "ShapeMismatch",
            NetError::NonFiniteLoss { .. } => "NonFiniteLoss",
            NetError::InvalidConfig(_) => "InvalidConfig",
            NetError::InvalidInput(_) => "InvalidInput",
            NetError::LayerOutOfRange { .. } => "LayerOutOfRange",
            NetError::NoClassImages(_) => "NoClassImages",
            NetError::Core(e) => e.name(),
        }
    }
}

pub type Result<T, E = NetError> = std::result::Result<T, E>;
