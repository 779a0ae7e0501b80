//! Reference networks whose layer-wise representations are probed with the GDV:
//! a multi-layer perceptron trained by backpropagation with ADAM, and a deep
//! belief network of restricted Boltzmann machines trained greedily with
//! contrastive divergence.

pub mod checkpoint;
pub mod dbn;
pub mod dream;
pub mod error;
pub mod mlp;
pub mod rbm;

pub use dbn::{dbn_layer_representation, dbn_train_greedy, DbnModel, DbnTrainConfig};
pub use checkpoint::{decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, Checkpoint};
pub use dream::{correlation, prototype_reconstruct, sparse_count, sparsify_top, PrototypeImage};
pub use error::{NetError, Result};
pub use mlp::{mlp_accuracy, mlp_layer_activations, mlp_train, Activation, MlpConfig, MlpModel};
pub use rbm::{rbm_train_cd, GibbsChain, RbmParams, RbmTrainConfig, RbmTraining};

/// Logistic function `1 / (1 + e^-x)`.
#[inline]
pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
