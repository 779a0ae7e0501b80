//! Fully connected classifier: hidden layers with a pointwise nonlinearity,
//! softmax output, categorical cross-entropy, mini-batch ADAM.

use gdv_core::{Label, LabeledDataset};
use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{NetError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Relu,
    Tanh,
    Logistic,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Logistic => "logistic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "relu" => Some(Activation::Relu),
            "tanh" => Some(Activation::Tanh),
            "logistic" | "sigmoid" => Some(Activation::Logistic),
            _ => None,
        }
    }

    pub(crate) fn code(self) -> u32 {
        match self {
            Activation::Relu => 0,
            Activation::Tanh => 1,
            Activation::Logistic => 2,
        }
    }

    pub(crate) fn from_code(code: u32) -> Option<Self> {
        [Activation::Relu, Activation::Tanh, Activation::Logistic].into_iter().find(|a| a.code() == code)
    }

    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::Logistic => crate::logistic(z),
        }
    }

    /// Derivative expressed through the pre-activation `z`.
    #[inline]
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - z.tanh().powi(2),
            Activation::Logistic => {
                let s = crate::logistic(z);
                s * (1.0 - s)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    /// Input width, hidden widths, output width (= number of classes).
    pub layer_widths: Vec<usize>,
    pub hidden_activation: Activation,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl MlpConfig {
    pub fn new(layer_widths: Vec<usize>) -> Self {
        Self {
            layer_widths,
            hidden_activation: Activation::Relu,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 10,
            batch_size: 32,
            seed: 0,
        }
    }

    /// `depth` hidden layers of equal `width`.
    pub fn constant(input: usize, width: usize, depth: usize, classes: usize) -> Self {
        let mut w = vec![input];
        w.extend(std::iter::repeat_n(width, depth));
        w.push(classes);
        Self::new(w)
    }

    /// Hidden widths `start, start - step, ...` for `depth` layers.
    pub fn decreasing(input: usize, start: usize, step: usize, depth: usize, classes: usize) -> Self {
        let mut w = vec![input];
        w.extend((0..depth).map(|i| start.saturating_sub(i * step).max(1)));
        w.push(classes);
        Self::new(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_widths.len() < 3 {
            return Err(NetError::InvalidConfig("need input, at least one hidden and an output layer".into()));
        }
        if self.layer_widths.contains(&0) {
            return Err(NetError::InvalidConfig("layer widths must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(NetError::InvalidConfig("learning rate must be positive".into()));
        }
        if !(0.0 < self.beta1 && self.beta1 < 1.0 && 0.0 < self.beta2 && self.beta2 < 1.0) {
            return Err(NetError::InvalidConfig("ADAM betas must lie in (0, 1)".into()));
        }
        if self.batch_size == 0 {
            return Err(NetError::InvalidConfig("batch size must be positive".into()));
        }
        Ok(())
    }

    pub fn n_hidden(&self) -> usize {
        self.layer_widths.len() - 2
    }
}

/// One affine layer, `out = in · weights + bias`; `weights` is `fan_in × fan_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    /// Uniform in `±sqrt(6 / fan_in)`, zero bias.
    fn init<R: Rng>(fan_in: usize, fan_out: usize, rng: &mut R) -> Self {
        let limit = (6.0 / fan_in as f64).sqrt();
        Self {
            weights: Array2::from_shape_fn((fan_in, fan_out), |_| rng.gen_range(-limit..limit)),
            bias: Array1::zeros(fan_out),
        }
    }

    fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        x.dot(&self.weights) + &self.bias
    }

    pub fn n_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub layers: Vec<Dense>,
    pub config: MlpConfig,
    pub history: Vec<EpochStats>,
}

/// Row-wise softmax, shifted by the row maximum.
pub fn softmax(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: ndarray::ArrayView1<'_, f64>) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Per-layer parameter gradients, same shapes as the model layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Dense>,
}

impl MlpModel {
    /// Freshly initialized, untrained model.
    pub fn init(config: MlpConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let layers = config.layer_widths.windows(2).map(|w| Dense::init(w[0], w[1], &mut rng)).collect();
        Ok(Self { layers, config, history: Vec::new() })
    }

    pub fn input_width(&self) -> usize {
        self.config.layer_widths[0]
    }

    pub fn n_classes(&self) -> usize {
        *self.config.layer_widths.last().expect("validated")
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(Dense::n_params).sum()
    }

    fn check_input(&self, x: &Array2<f64>) -> Result<()> {
        if x.ncols() != self.input_width() {
            return Err(NetError::ShapeMismatch { what: "input width", expected: self.input_width(), found: x.ncols() });
        }
        Ok(())
    }

    fn check_labels(&self, labels: &[Label]) -> Result<()> {
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= self.n_classes()) {
            return Err(NetError::ShapeMismatch { what: "label (must be below output width)", expected: self.n_classes(), found: bad as usize });
        }
        Ok(())
    }

    /// Pre-activations of every layer (`zs`) and the hidden activations
    /// (`acts[0]` is the input, `acts[k]` the output of hidden layer `k`).
    fn forward_full(&self, x: &Array2<f64>) -> (Vec<Array2<f64>>, Vec<Array2<f64>>) {
        let act = self.config.hidden_activation;
        let mut acts = vec![x.clone()];
        let mut zs = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(acts.last().expect("non-empty"));
            if i + 1 < self.layers.len() {
                acts.push(z.mapv(|v| act.apply(v)));
            }
            zs.push(z);
        }
        (zs, acts)
    }

    /// Output logits (pre-softmax).
    pub fn logits(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        self.check_input(x)?;
        let (mut zs, _) = self.forward_full(x);
        Ok(zs.pop().expect("at least one layer"))
    }

    pub fn predict_proba(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        Ok(softmax(&self.logits(x)?))
    }

    pub fn predict(&self, x: &Array2<f64>) -> Result<Vec<Label>> {
        let logits = self.logits(x)?;
        Ok(logits.rows().into_iter().map(|r| argmax(r) as Label).collect())
    }

    /// Mean categorical cross-entropy.
    pub fn loss(&self, x: &Array2<f64>, labels: &[Label]) -> Result<f64> {
        self.check_labels(labels)?;
        let p = self.predict_proba(x)?;
        Ok(cross_entropy(&p, labels))
    }

    /// Loss and its gradient with respect to every parameter.
    pub fn loss_and_gradients(&self, x: &Array2<f64>, labels: &[Label]) -> Result<(f64, Gradients)> {
        self.check_input(x)?;
        self.check_labels(labels)?;
        if x.nrows() != labels.len() {
            return Err(NetError::ShapeMismatch { what: "label count", expected: x.nrows(), found: labels.len() });
        }
        let (zs, acts) = self.forward_full(x);
        let probs = softmax(zs.last().expect("non-empty"));
        let loss = cross_entropy(&probs, labels);
        let batch = x.nrows() as f64;
        let mut delta = probs;
        for (i, &l) in labels.iter().enumerate() {
            delta[[i, l as usize]] -= 1.0;
        }
        delta /= batch;

        let act = self.config.hidden_activation;
        let mut grads: Vec<Dense> = Vec::with_capacity(self.layers.len());
        for k in (0..self.layers.len()).rev() {
            let input = &acts[k];
            grads.push(Dense { weights: input.t().dot(&delta), bias: delta.sum_axis(Axis(0)) });
            if k > 0 {
                let mut back = delta.dot(&self.layers[k].weights.t());
                back.zip_mut_with(&zs[k - 1], |d, &z| *d *= act.derivative(z));
                delta = back;
            }
        }
        grads.reverse();
        Ok((loss, Gradients { layers: grads }))
    }

    /// All parameters flattened, layer by layer (weights row-major, then bias).
    pub fn flat_params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
            .collect()
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.n_params());
        let mut it = flat.iter().copied();
        for l in &mut self.layers {
            l.weights.iter_mut().chain(l.bias.iter_mut()).for_each(|p| *p = it.next().expect("length checked"));
        }
    }
}

impl Gradients {
    pub fn flat(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
            .collect()
    }
}

fn cross_entropy(probs: &Array2<f64>, labels: &[Label]) -> f64 {
    let n = labels.len() as f64;
    -labels
        .iter()
        .enumerate()
        .map(|(i, &l)| probs[[i, l as usize]].max(1e-300).ln())
        .sum::<f64>()
        / n
}

/// ADAM state for one model.
#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(cfg: &MlpConfig, n_params: usize) -> Self {
        Self {
            learning_rate: cfg.learning_rate,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            epsilon: cfg.epsilon,
            step: 0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
        }
    }

    /// One bias-corrected update of `params` in place.
    pub fn update(&mut self, params: &mut [f64], grads: &[f64]) {
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        for (((p, &g), m), v) in params.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }

    fn update_model(&mut self, model: &mut MlpModel, grads: &Gradients) {
        let mut params = model.flat_params();
        self.update(&mut params, &grads.flat());
        model.set_flat_params(&params);
    }
}

/// Trains a fresh model from `cfg` on `train`.
pub fn mlp_train(cfg: &MlpConfig, train: &LabeledDataset) -> Result<MlpModel> {
    let mut model = MlpModel::init(cfg.clone())?;
    continue_training(&mut model, train, cfg.epochs)?;
    Ok(model)
}

/// Runs `epochs` more epochs of mini-batch ADAM on `model`.
pub fn continue_training(model: &mut MlpModel, train: &LabeledDataset, epochs: usize) -> Result<()> {
    let x = train.points();
    let labels = train.labels();
    model.check_input(x)?;
    model.check_labels(labels)?;
    let cfg = model.config.clone();
    let mut adam = Adam::new(&cfg, model.n_params());
    for _ in 0..epochs {
        let epoch = model.history.len();
        // Batch order depends only on (seed, epoch), so resumed training matches.
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(1 + epoch as u64);
        let mut order: Vec<usize> = (0..x.nrows()).collect();
        order.shuffle(&mut rng);
        let (mut loss_sum, mut correct) = (0.0, 0usize);
        for chunk in order.chunks(cfg.batch_size) {
            let xb = x.select(Axis(0), chunk);
            let yb: Vec<Label> = chunk.iter().map(|&i| labels[i]).collect();
            let (loss, grads) = model.loss_and_gradients(&xb, &yb)?;
            if !loss.is_finite() {
                return Err(NetError::NonFiniteLoss { epoch });
            }
            loss_sum += loss * chunk.len() as f64;
            let logits = model.logits(&xb)?;
            correct += logits.rows().into_iter().zip(&yb).filter(|(r, &y)| argmax(r.view()) == y as usize).count();
            adam.update_model(model, &grads);
        }
        let n = x.nrows() as f64;
        if model.layers.iter().any(|l| l.weights.iter().any(|v| !v.is_finite())) {
            return Err(NetError::NonFiniteLoss { epoch });
        }
        model.history.push(EpochStats { epoch, loss: loss_sum / n, accuracy: correct as f64 / n });
    }
    Ok(())
}

/// Layer-wise representations of `inputs`: the raw input, every hidden layer
/// after its nonlinearity, and the output logits. All carry the input labels.
pub fn mlp_layer_activations(model: &MlpModel, inputs: &LabeledDataset) -> Result<Vec<(String, LabeledDataset)>> {
    model.check_input(inputs.points())?;
    let (mut zs, acts) = model.forward_full(inputs.points());
    let logits = zs.pop().expect("non-empty");
    let mut out = Vec::with_capacity(acts.len() + 1);
    for (k, a) in acts.into_iter().enumerate() {
        let id = if k == 0 { "input".to_string() } else { format!("hidden_{k}") };
        out.push((id, inputs.with_points(a)?));
    }
    out.push(("output".to_string(), inputs.with_points(logits)?));
    Ok(out)
}

/// Fraction of points whose argmax prediction equals the label.
pub fn mlp_accuracy(model: &MlpModel, test: &LabeledDataset) -> Result<f64> {
    let pred = model.predict(test.points())?;
    let correct = pred.iter().zip(test.labels()).filter(|(p, l)| p == l).count();
    Ok(correct as f64 / test.n_points() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn softmax_rows_sum_to_one() {
        let p = softmax(&array![[1.0, 2.0, 3.0], [1000.0, -1000.0, 0.0], [0.0, 0.0, 0.0]]);
        for r in p.rows() {
            assert!((r.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn argmax_ties_prefer_lowest_index() {
        assert_eq!(argmax(array![1.0, 3.0, 3.0].view()), 1);
        assert_eq!(argmax(array![2.0, 2.0].view()), 0);
    }

    #[test]
    fn config_validation() {
        assert!(MlpConfig::new(vec![2, 2]).validate().is_err());
        assert!(MlpConfig::new(vec![2, 0, 2]).validate().is_err());
        let mut c = MlpConfig::new(vec![2, 3, 2]);
        c.beta1 = 1.0;
        assert!(c.validate().is_err());
        c.beta1 = 0.9;
        c.learning_rate = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn decreasing_widths() {
        let c = MlpConfig::decreasing(784, 256, 10, 15, 10);
        assert_eq!(c.layer_widths[1], 256);
        assert_eq!(c.layer_widths[2], 246);
        assert_eq!(c.layer_widths[15], 116);
        assert_eq!(c.n_hidden(), 15);
    }

    #[test]
    fn constructed_pass_through_layer() {
        // One hidden ReLU layer with identity weights and a +10 bias keeps every
        // input in the linear region, so layer 1 is exactly x + 10.
        let mut model = MlpModel::init(MlpConfig::new(vec![2, 2, 2])).unwrap();
        model.layers[0].weights = Array2::eye(2);
        model.layers[0].bias = array![10.0, 10.0];
        let ds = LabeledDataset::from_rows(&[vec![0.5, -3.0], vec![2.0, 1.0]], vec![0, 1]).unwrap();
        let layers = mlp_layer_activations(&model, &ds).unwrap();
        assert_eq!(layers.len(), 3);
        assert_eq!(layers[0].1, ds);
        assert_eq!(layers[1].1.points(), &array![[10.5, 7.0], [12.0, 11.0]]);
        assert!(layers.iter().all(|(_, d)| d.n_points() == 2 && d.labels() == ds.labels()));
    }

    #[test]
    fn accuracy_of_constructed_classifier() {
        let mut model = MlpModel::init(MlpConfig::new(vec![1, 1, 2])).unwrap();
        model.layers[0].weights = array![[1.0]];
        model.layers[0].bias = array![0.0];
        model.layers[1].weights = array![[-1.0, 1.0]];
        model.layers[1].bias = array![0.5, -0.5];
        let ds = LabeledDataset::from_rows(&[vec![0.0], vec![2.0]], vec![0, 1]).unwrap();
        assert_eq!(mlp_accuracy(&model, &ds).unwrap(), 1.0);
        let flipped = ds.with_labels(vec![1, 0]).unwrap();
        assert_eq!(mlp_accuracy(&model, &flipped).unwrap(), 0.0);
    }

    #[test]
    fn wrong_input_width() {
        let model = MlpModel::init(MlpConfig::new(vec![3, 4, 2])).unwrap();
        let ds = LabeledDataset::from_rows(&[vec![0.0, 1.0]], vec![0]).unwrap();
        assert!(matches!(mlp_accuracy(&model, &ds), Err(NetError::ShapeMismatch { .. })));
        assert!(matches!(mlp_layer_activations(&model, &ds), Err(NetError::ShapeMismatch { .. })));
    }

    #[test]
    fn label_out_of_range() {
        let cfg = MlpConfig::new(vec![1, 2, 2]);
        let ds = LabeledDataset::from_rows(&[vec![0.0], vec![1.0]], vec![0, 5]).unwrap();
        assert!(matches!(mlp_train(&cfg, &ds), Err(NetError::ShapeMismatch { .. })));
    }

    #[test]
    fn zero_epochs_is_initialization() {
        let mut cfg = MlpConfig::new(vec![2, 4, 2]);
        cfg.epochs = 0;
        cfg.seed = 11;
        let ds = LabeledDataset::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], vec![0, 1]).unwrap();
        assert_eq!(mlp_train(&cfg, &ds).unwrap().layers, MlpModel::init(cfg).unwrap().layers);
    }

    #[test]
    fn divergence_is_reported() {
        let mut cfg = MlpConfig::new(vec![1, 4, 2]);
        cfg.learning_rate = 1e300;
        cfg.epochs = 5;
        let ds = LabeledDataset::from_rows(&[vec![1e200], vec![-1e200]], vec![0, 1]).unwrap();
        assert!(matches!(mlp_train(&cfg, &ds), Err(NetError::NonFiniteLoss { .. })));
    }

    #[test]
    fn activation_names() {
        for a in [Activation::Relu, Activation::Tanh, Activation::Logistic] {
            assert_eq!(Activation::from_name(a.name()), Some(a));
            assert_eq!(Activation::from_code(a.code()), Some(a));
        }
    }
}
