//! Deep belief network: a stack of RBMs trained greedily, one layer at a time.

use gdv_core::LabeledDataset;
use ndarray::Array2;

use crate::error::{NetError, Result};
use crate::rbm::{rbm_train_cd, RbmParams, RbmTrainConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct DbnTrainConfig {
    /// Visible width followed by each hidden width.
    pub layer_widths: Vec<usize>,
    pub epochs: usize,
    pub learning_rate: f64,
    pub cd_steps: usize,
    pub batch_size: usize,
    pub momentum: f64,
    pub weight_decay: f64,
    pub seed: u64,
}

impl DbnTrainConfig {
    pub fn new(layer_widths: Vec<usize>) -> Self {
        let base = RbmTrainConfig::default();
        Self {
            layer_widths,
            epochs: base.epochs,
            learning_rate: base.learning_rate,
            cd_steps: base.cd_steps,
            batch_size: base.batch_size,
            momentum: base.momentum,
            weight_decay: base.weight_decay,
            seed: 0,
        }
    }

    /// `depth` hidden layers of equal `width`.
    pub fn constant(input: usize, width: usize, depth: usize) -> Self {
        let mut w = vec![input];
        w.extend(std::iter::repeat_n(width, depth));
        Self::new(w)
    }

    /// Hidden widths `start, start - step, ...`, never below 1.
    pub fn decreasing(input: usize, start: usize, step: usize, depth: usize) -> Self {
        let mut w = vec![input];
        w.extend((0..depth).map(|i| start.saturating_sub(i * step).max(1)));
        Self::new(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_widths.len() < 2 {
            return Err(NetError::InvalidConfig("a DBN needs a visible and at least one hidden layer".into()));
        }
        if self.layer_widths.contains(&0) {
            return Err(NetError::InvalidConfig("layer widths must be positive".into()));
        }
        self.layer_config(0).validate()
    }

    /// Seed for RBM `layer`; layer 0 uses the configured seed itself.
    pub fn layer_seed(&self, layer: usize) -> u64 {
        self.seed.wrapping_add((layer as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    pub fn layer_config(&self, layer: usize) -> RbmTrainConfig {
        RbmTrainConfig {
            hidden: self.layer_widths[layer + 1],
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            cd_steps: self.cd_steps,
            batch_size: self.batch_size,
            momentum: self.momentum,
            weight_decay: self.weight_decay,
            seed: self.layer_seed(layer),
            ..RbmTrainConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DbnModel {
    pub layers: Vec<RbmParams>,
    /// Mean reconstruction error per epoch, one list per RBM.
    pub reconstruction_error: Vec<Vec<f64>>,
}

impl DbnModel {
    /// Builds a model from an explicit stack, checking that widths chain.
    pub fn from_layers(layers: Vec<RbmParams>) -> Result<Self> {
        if layers.is_empty() {
            return Err(NetError::InvalidConfig("a DBN needs at least one RBM".into()));
        }
        for (l, pair) in layers.windows(2).enumerate() {
            if pair[0].n_hidden() != pair[1].n_visible() {
                return Err(NetError::ShapeMismatch {
                    what: if l == 0 { "visible width of RBM 1" } else { "visible width of a stacked RBM" },
                    expected: pair[0].n_hidden(),
                    found: pair[1].n_visible(),
                });
            }
        }
        let reconstruction_error = vec![Vec::new(); layers.len()];
        Ok(Self { layers, reconstruction_error })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Visible width followed by every hidden width.
    pub fn widths(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].n_visible()).chain(self.layers.iter().map(RbmParams::n_hidden)).collect()
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].n_visible()
    }

    fn check_layer(&self, layer: usize) -> Result<()> {
        if layer > self.depth() {
            return Err(NetError::LayerOutOfRange { layer, depth: self.depth() });
        }
        Ok(())
    }

    /// Deterministic upward pass to `layer` using hidden probabilities.
    pub fn propagate_up(&self, inputs: &Array2<f64>, layer: usize) -> Result<Array2<f64>> {
        self.check_layer(layer)?;
        if inputs.ncols() != self.input_width() {
            return Err(NetError::ShapeMismatch { what: "input width", expected: self.input_width(), found: inputs.ncols() });
        }
        let mut x = inputs.clone();
        for rbm in &self.layers[..layer] {
            x = rbm.hidden_probs(&x);
        }
        Ok(x)
    }

    /// Every representation from the input (index 0) to the top layer.
    pub fn all_representations(&self, inputs: &Array2<f64>) -> Result<Vec<Array2<f64>>> {
        let mut out = vec![self.propagate_up(inputs, 0)?];
        for rbm in &self.layers {
            let next = rbm.hidden_probs(out.last().expect("non-empty"));
            out.push(next);
        }
        Ok(out)
    }

    /// Deterministic downward pass from `layer` to the input space through
    /// the transposed weights, visible biases and logistic units.
    pub fn propagate_down(&self, activity: &Array2<f64>, layer: usize) -> Result<Array2<f64>> {
        self.check_layer(layer)?;
        let width = self.widths()[layer];
        if activity.ncols() != width {
            return Err(NetError::ShapeMismatch { what: "layer width", expected: width, found: activity.ncols() });
        }
        let mut x = activity.clone();
        for rbm in self.layers[..layer].iter().rev() {
            x = rbm.visible_probs(&x);
        }
        Ok(x)
    }
}

/// Trains RBM 1 on `data`, then each further RBM on the hidden probabilities
/// of the one below it.
pub fn dbn_train_greedy(data: &Array2<f64>, cfg: &DbnTrainConfig) -> Result<DbnModel> {
    cfg.validate()?;
    if data.ncols() != cfg.layer_widths[0] {
        return Err(NetError::ShapeMismatch { what: "input width", expected: cfg.layer_widths[0], found: data.ncols() });
    }
    let depth = cfg.layer_widths.len() - 1;
    let mut layers = Vec::with_capacity(depth);
    let mut errors = Vec::with_capacity(depth);
    let mut x = data.clone();
    for l in 0..depth {
        let trained = rbm_train_cd(&x, &cfg.layer_config(l))?;
        if l + 1 < depth {
            x = trained.params.hidden_probs(&x);
        }
        layers.push(trained.params);
        errors.push(trained.reconstruction_error);
    }
    Ok(DbnModel { layers, reconstruction_error: errors })
}

/// Layer-`layer` representation of `inputs`, carrying the input labels.
pub fn dbn_layer_representation(model: &DbnModel, inputs: &LabeledDataset, layer: usize) -> Result<LabeledDataset> {
    let rep = model.propagate_up(inputs.points(), layer)?;
    Ok(inputs.with_points(rep)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array1;

    fn zero_rbm(visible: usize, hidden: usize) -> RbmParams {
        RbmParams {
            weights: Array2::zeros((hidden, visible)),
            visible_bias: Array1::zeros(visible),
            hidden_bias: Array1::zeros(hidden),
        }
    }

    #[test]
    fn width_chain_enforced() {
        assert!(DbnModel::from_layers(vec![zero_rbm(4, 3), zero_rbm(3, 2)]).is_ok());
        assert!(matches!(
            DbnModel::from_layers(vec![zero_rbm(4, 3), zero_rbm(2, 2)]),
            Err(NetError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn zero_model_gives_one_half_everywhere() {
        let m = DbnModel::from_layers(vec![zero_rbm(4, 3), zero_rbm(3, 5)]).unwrap();
        let x = Array2::from_shape_fn((3, 4), |(i, j)| (i * 4 + j) as f64 / 12.0);
        for l in 1..=2 {
            assert!(m.propagate_up(&x, l).unwrap().iter().all(|&p| p == 0.5));
        }
        assert_eq!(m.propagate_up(&x, 0).unwrap(), x);
        assert!(matches!(m.propagate_up(&x, 3), Err(NetError::LayerOutOfRange { layer: 3, depth: 2 })));
    }

    #[test]
    fn layer_seeds() {
        let cfg = DbnTrainConfig { seed: 42, ..DbnTrainConfig::constant(4, 3, 3) };
        assert_eq!(cfg.layer_seed(0), 42);
        assert_ne!(cfg.layer_seed(1), cfg.layer_seed(2));
    }

    #[test]
    fn decreasing_schedule() {
        assert_eq!(DbnTrainConfig::decreasing(784, 256, 10, 3).layer_widths, vec![784, 256, 246, 236]);
    }

    #[test]
    fn representations_match_propagate_up() {
        let data = Array2::from_shape_fn((10, 6), |(i, j)| ((i + j) % 2) as f64);
        let cfg = DbnTrainConfig { epochs: 3, batch_size: 5, seed: 8, ..DbnTrainConfig::new(vec![6, 5, 4]) };
        let m = dbn_train_greedy(&data, &cfg).unwrap();
        let reps = m.all_representations(&data).unwrap();
        assert_eq!(reps.len(), 3);
        for (l, r) in reps.iter().enumerate() {
            assert_eq!(r, &m.propagate_up(&data, l).unwrap());
        }
        assert_eq!(m.propagate_down(&reps[2], 2).unwrap().dim(), (10, 6));
    }
}
