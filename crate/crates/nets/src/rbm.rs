//! Bernoulli restricted Boltzmann machine trained by contrastive divergence.

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{NetError, Result};
use crate::logistic;

/// Weights are `hidden × visible`.
#[derive(Debug, Clone, PartialEq)]
pub struct RbmParams {
    pub weights: Array2<f64>,
    pub visible_bias: Array1<f64>,
    pub hidden_bias: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RbmTrainConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub cd_steps: usize,
    pub batch_size: usize,
    pub momentum: f64,
    pub weight_decay: f64,
    pub init_std: f64,
    pub seed: u64,
}

impl Default for RbmTrainConfig {
    fn default() -> Self {
        Self {
            hidden: 256,
            epochs: 5,
            learning_rate: 0.05,
            cd_steps: 1,
            batch_size: 20,
            momentum: 0.5,
            weight_decay: 0.0,
            init_std: 0.01,
            seed: 0,
        }
    }
}

impl RbmTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 {
            return Err(NetError::InvalidConfig("hidden width must be positive".into()));
        }
        if self.cd_steps == 0 {
            return Err(NetError::InvalidConfig("contrastive divergence needs at least one Gibbs step".into()));
        }
        if self.batch_size == 0 {
            return Err(NetError::InvalidConfig("batch size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(NetError::InvalidConfig("learning rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) || self.weight_decay < 0.0 {
            return Err(NetError::InvalidConfig("momentum must lie in [0, 1) and weight decay be non-negative".into()));
        }
        if self.init_std.is_nan() || self.init_std < 0.0 {
            return Err(NetError::InvalidConfig("initial weight spread must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsChain {
    pub h0: Array2<f64>,
    pub visible: Array2<f64>,
    pub hidden: Array2<f64>,
}

/// Result of training: parameters plus mean reconstruction error per epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct RbmTraining {
    pub params: RbmParams,
    pub reconstruction_error: Vec<f64>,
}

fn bernoulli<R: Rng>(p: &Array2<f64>, rng: &mut R) -> Array2<f64> {
    p.mapv(|q| if rng.gen::<f64>() < q { 1.0 } else { 0.0 })
}

impl RbmParams {
    /// Small Gaussian weights, zero biases.
    pub fn init(visible: usize, hidden: usize, init_std: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, init_std).expect("validated spread");
        Self {
            weights: Array2::from_shape_fn((hidden, visible), |_| normal.sample(&mut rng)),
            visible_bias: Array1::zeros(visible),
            hidden_bias: Array1::zeros(hidden),
        }
    }

    pub fn n_visible(&self) -> usize {
        self.weights.ncols()
    }

    pub fn n_hidden(&self) -> usize {
        self.weights.nrows()
    }

    /// `P(h = 1 | v)` for a batch of visible rows.
    pub fn hidden_probs(&self, v: &Array2<f64>) -> Array2<f64> {
        (v.dot(&self.weights.t()) + &self.hidden_bias).mapv(logistic)
    }

    /// `P(v = 1 | h)` for a batch of hidden rows.
    pub fn visible_probs(&self, h: &Array2<f64>) -> Array2<f64> {
        (h.dot(&self.weights) + &self.visible_bias).mapv(logistic)
    }

    /// `k` alternating Gibbs steps starting from `v0`. Returns the sampled
    /// initial hidden state, the final visible probabilities and the final
    /// hidden probabilities; intermediate hidden states are sampled.
    pub fn gibbs_chain<R: Rng>(&self, v0: &Array2<f64>, k: usize, rng: &mut R) -> GibbsChain {
        let h0 = bernoulli(&self.hidden_probs(v0), rng);
        let mut h = h0.clone();
        let mut v = v0.clone();
        let mut h_prob = self.hidden_probs(v0);
        for step in 0..k {
            v = self.visible_probs(&h);
            h_prob = self.hidden_probs(&v);
            if step + 1 < k {
                h = bernoulli(&h_prob, rng);
            }
        }
        GibbsChain { h0, visible: v, hidden: h_prob }
    }

    fn check_visible(&self, data: &Array2<f64>) -> Result<()> {
        if data.ncols() != self.n_visible() {
            return Err(NetError::ShapeMismatch { what: "visible width", expected: self.n_visible(), found: data.ncols() });
        }
        Ok(())
    }

    /// Mean squared difference between data and its one-step reconstruction.
    pub fn reconstruction_error(&self, data: &Array2<f64>) -> Result<f64> {
        self.check_visible(data)?;
        let recon = self.visible_probs(&self.hidden_probs(data));
        Ok((&recon - data).mapv(|d| d * d).mean().unwrap_or(0.0))
    }
}

/// Trains an RBM on `data` (rows in `[0, 1]`) with CD-k and momentum.
pub fn rbm_train_cd(data: &Array2<f64>, cfg: &RbmTrainConfig) -> Result<RbmTraining> {
    cfg.validate()?;
    if data.nrows() == 0 || data.ncols() == 0 {
        return Err(NetError::InvalidInput("training data is empty".into()));
    }
    if data.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(NetError::InvalidInput("visible units must lie in [0, 1]".into()));
    }
    let mut params = RbmParams::init(data.ncols(), cfg.hidden, cfg.init_std, cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut dw = Array2::<f64>::zeros(params.weights.raw_dim());
    let mut dvb = Array1::<f64>::zeros(params.n_visible());
    let mut dhb = Array1::<f64>::zeros(params.n_hidden());
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<usize> = (0..data.nrows()).collect();

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut err_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let v0 = data.select(Axis(0), chunk);
            let n = chunk.len() as f64;
            let GibbsChain { h0, visible: vk, hidden: hk } = params.gibbs_chain(&v0, cfg.cd_steps, &mut rng);

            let grad_w = (h0.t().dot(&v0) - hk.t().dot(&vk)) / n - &params.weights * cfg.weight_decay;
            let grad_vb = (&v0 - &vk).sum_axis(Axis(0)) / n;
            let grad_hb = (&h0 - &hk).sum_axis(Axis(0)) / n;

            dw = &dw * cfg.momentum + grad_w * cfg.learning_rate;
            dvb = &dvb * cfg.momentum + grad_vb * cfg.learning_rate;
            dhb = &dhb * cfg.momentum + grad_hb * cfg.learning_rate;
            params.weights += &dw;
            params.visible_bias += &dvb;
            params.hidden_bias += &dhb;

            err_sum += (&vk - &v0).mapv(|d| d * d).sum();
        }
        let err = err_sum / data.len() as f64;
        if !err.is_finite() || params.weights.iter().any(|w| !w.is_finite()) {
            return Err(NetError::NonFiniteLoss { epoch });
        }
        history.push(err);
    }
    Ok(RbmTraining { params, reconstruction_error: history })
}
