//! Binary model checkpoints.
//!
//! Layout (all integers little-endian `u32` unless noted, reals little-endian `f64`):
//!
//! ```text
//! "GDVM" | version = 1 | kind (1 = MLP, 2 = DBN) | n_widths | widths...
//! MLP:  activation code | learning_rate beta1 beta2 epsilon | epochs | batch_size | seed (u64)
//!       per layer: weights (fan_in × fan_out, row-major), bias
//!       n_history | per epoch: epoch (u32), loss, accuracy
//! DBN:  per RBM: weights (hidden × visible, row-major), visible bias, hidden bias,
//!       n_errors, reconstruction errors
//! ```

use std::io::Write;
use std::path::Path;

use gdv_core::io::{create, read_bytes, ByteReader};
use gdv_core::Error as CoreError;
use ndarray::{Array1, Array2};

use crate::dbn::DbnModel;
use crate::error::{NetError, Result};
use crate::mlp::{Activation, Dense, EpochStats, MlpConfig, MlpModel};
use crate::rbm::RbmParams;

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"GDVM";
pub const CHECKPOINT_VERSION: u32 = 1;
const KIND_MLP: u32 = 1;
const KIND_DBN: u32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum Checkpoint {
    Mlp(MlpModel),
    Dbn(DbnModel),
}

impl Checkpoint {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Checkpoint::Mlp(_) => "mlp",
            Checkpoint::Dbn(_) => "dbn",
        }
    }
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u32).to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn reals<'a>(&mut self, vs: impl IntoIterator<Item = &'a f64>) {
        for &v in vs {
            self.f64(v);
        }
    }
}

pub fn encode_checkpoint(ckpt: &Checkpoint) -> Vec<u8> {
    let mut w = Writer::default();
    w.0.extend_from_slice(&CHECKPOINT_MAGIC);
    w.u32(CHECKPOINT_VERSION as usize);
    match ckpt {
        Checkpoint::Mlp(m) => {
            w.u32(KIND_MLP as usize);
            w.u32(m.config.layer_widths.len());
            m.config.layer_widths.iter().for_each(|&x| w.u32(x));
            let c = &m.config;
            w.u32(c.hidden_activation.code() as usize);
            w.reals(&[c.learning_rate, c.beta1, c.beta2, c.epsilon]);
            w.u32(c.epochs);
            w.u32(c.batch_size);
            w.0.extend_from_slice(&c.seed.to_le_bytes());
            for l in &m.layers {
                w.reals(l.weights.iter());
                w.reals(l.bias.iter());
            }
            w.u32(m.history.len());
            for h in &m.history {
                w.u32(h.epoch);
                w.f64(h.loss);
                w.f64(h.accuracy);
            }
        }
        Checkpoint::Dbn(d) => {
            w.u32(KIND_DBN as usize);
            let widths = d.widths();
            w.u32(widths.len());
            widths.iter().for_each(|&x| w.u32(x));
            for (i, r) in d.layers.iter().enumerate() {
                w.reals(r.weights.iter());
                w.reals(r.visible_bias.iter());
                w.reals(r.hidden_bias.iter());
                let errs = d.reconstruction_error.get(i).map(Vec::as_slice).unwrap_or(&[]);
                w.u32(errs.len());
                w.reals(errs);
            }
        }
    }
    w.0
}

fn reals(r: &mut ByteReader<'_>, n: usize) -> Result<Vec<f64>> {
    // Size check happens before any allocation proportional to `n`.
    r.require(n.saturating_mul(8))?;
    (0..n).map(|_| Ok(r.f64_le()?)).collect()
}

fn matrix(r: &mut ByteReader<'_>, rows: usize, cols: usize) -> Result<Array2<f64>> {
    let v = reals(r, rows.saturating_mul(cols))?;
    Ok(Array2::from_shape_vec((rows, cols), v).expect("length matches shape"))
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Checkpoint> {
    let mut r = ByteReader::new(bytes);
    let magic = r.take(4)?;
    if magic != CHECKPOINT_MAGIC {
        return Err(CoreError::BadMagic {
            expected: u32::from_be_bytes(CHECKPOINT_MAGIC),
            found: u32::from_be_bytes(magic.try_into().expect("4 bytes")),
        }
        .into());
    }
    let version = r.u32_le()?;
    if version != CHECKPOINT_VERSION {
        return Err(CoreError::UnsupportedVersion(version).into());
    }
    let kind = r.u32_le()?;
    let n_widths = r.u32_le()? as usize;
    r.require(n_widths.saturating_mul(4))?;
    let widths: Vec<usize> = (0..n_widths).map(|_| r.u32_le().map(|x| x as usize)).collect::<gdv_core::Result<_>>()?;
    if widths.len() < 2 || widths.contains(&0) {
        return Err(NetError::InvalidInput("checkpoint declares invalid layer widths".into()));
    }
    match kind {
        KIND_MLP => {
            let code = r.u32_le()?;
            let hidden_activation = Activation::from_code(code)
                .ok_or_else(|| NetError::InvalidInput(format!("unknown activation code {code}")))?;
            let learning_rate = r.f64_le()?;
            let beta1 = r.f64_le()?;
            let beta2 = r.f64_le()?;
            let epsilon = r.f64_le()?;
            let epochs = r.u32_le()? as usize;
            let batch_size = r.u32_le()? as usize;
            let seed = u64::from_le_bytes(r.take(8)?.try_into().expect("8 bytes"));
            let config = MlpConfig {
                layer_widths: widths.clone(),
                hidden_activation,
                learning_rate,
                beta1,
                beta2,
                epsilon,
                epochs,
                batch_size,
                seed,
            };
            config.validate()?;
            let mut layers = Vec::new();
            for pair in widths.windows(2) {
                let weights = matrix(&mut r, pair[0], pair[1])?;
                let bias = Array1::from(reals(&mut r, pair[1])?);
                layers.push(Dense { weights, bias });
            }
            let n_hist = r.u32_le()? as usize;
            r.require(n_hist.saturating_mul(20))?;
            let mut history = Vec::with_capacity(n_hist);
            for _ in 0..n_hist {
                let epoch = r.u32_le()? as usize;
                history.push(EpochStats { epoch, loss: r.f64_le()?, accuracy: r.f64_le()? });
            }
            Ok(Checkpoint::Mlp(MlpModel { layers, config, history }))
        }
        KIND_DBN => {
            let mut layers = Vec::new();
            let mut errors = Vec::new();
            for pair in widths.windows(2) {
                let weights = matrix(&mut r, pair[1], pair[0])?;
                let visible_bias = Array1::from(reals(&mut r, pair[0])?);
                let hidden_bias = Array1::from(reals(&mut r, pair[1])?);
                layers.push(RbmParams { weights, visible_bias, hidden_bias });
                let n = r.u32_le()? as usize;
                errors.push(reals(&mut r, n)?);
            }
            let mut model = DbnModel::from_layers(layers)?;
            model.reconstruction_error = errors;
            Ok(Checkpoint::Dbn(model))
        }
        other => Err(NetError::InvalidInput(format!("unknown checkpoint kind {other}"))),
    }
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(&encode_checkpoint(ckpt))
        .and_then(|_| f.flush())
        .map_err(|e| CoreError::io(path, e))?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    decode_checkpoint(&read_bytes(path)?)
}
