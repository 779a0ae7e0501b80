use gdv_core::synthetic::{generate_clusters, ClusterSpec};
use gdv_core::{gdv, LabeledDataset};
use gdv_nets::mlp::{Adam, MlpModel};
use gdv_nets::{mlp_accuracy, mlp_layer_activations, mlp_train, MlpConfig};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn backprop_matches_central_differences() {
    let mut cfg = MlpConfig::new(vec![2, 3, 4, 5]);
    cfg.seed = 3;
    let mut model = MlpModel::init(cfg).unwrap();
    assert_eq!(model.n_params(), 50);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let x = Array2::from_shape_fn((7, 2), |_| rng.gen_range(-2.0..2.0));
    let y: Vec<u32> = (0..7).map(|i| (i % 5) as u32).collect();

    let (_, grads) = model.loss_and_gradients(&x, &y).unwrap();
    let analytic = grads.flat();
    let base = model.flat_params();
    let h = 1e-5;
    let mut numeric = Vec::with_capacity(base.len());
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] = base[i] + h;
        model.set_flat_params(&p);
        let up = model.loss(&x, &y).unwrap();
        p[i] = base[i] - h;
        model.set_flat_params(&p);
        let down = model.loss(&x, &y).unwrap();
        numeric.push((up - down) / (2.0 * h));
    }
    let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, n)| a - n).collect();
    let rel = norm(&diff) / norm(&analytic).max(norm(&numeric));
    assert!(rel < 1e-4, "relative gradient error {rel}");
}

#[test]
fn adam_with_vanishing_rate_keeps_parameters() {
    let mut cfg = MlpConfig::new(vec![2, 3, 2]);
    cfg.learning_rate = 1e-300;
    let model = MlpModel::init(cfg.clone()).unwrap();
    let before = model.flat_params();
    let mut params = before.clone();
    let mut adam = Adam::new(&cfg, params.len());
    let grads: Vec<f64> = (0..params.len()).map(|i| i as f64 - 3.0).collect();
    for _ in 0..10 {
        adam.update(&mut params, &grads);
    }
    for (a, b) in before.iter().zip(&params) {
        assert!((a - b).abs() <= 1e-12);
    }
}

fn fig1a(seed: u64) -> LabeledDataset {
    generate_clusters(&ClusterSpec::separated(seed)).unwrap()
}

fn small_config(seed: u64) -> MlpConfig {
    let mut cfg = MlpConfig::constant(2, 16, 3, 2);
    cfg.epochs = 20;
    cfg.seed = seed;
    cfg
}

#[test]
fn separable_clusters_are_learned() {
    let data = fig1a(1);
    let model = mlp_train(&small_config(5), &data).unwrap();
    assert!(mlp_accuracy(&model, &data).unwrap() > 0.95);
    assert_eq!(model.history.len(), 20);
    assert_eq!(mlp_layer_activations(&model, &data).unwrap().len(), 5);
}

#[test]
fn trained_net_final_hidden_layer_beats_input() {
    let data = fig1a(1);
    let model = mlp_train(&small_config(5), &data).unwrap();
    let layers = mlp_layer_activations(&model, &data).unwrap();
    let first = gdv(&layers[0].1).unwrap().gdv;
    let last_hidden = gdv(&layers[3].1).unwrap().gdv;
    assert!(last_hidden < first, "{last_hidden} vs {first}");
}

#[test]
fn training_is_deterministic() {
    let data = fig1a(2);
    let mut cfg = small_config(9);
    cfg.epochs = 3;
    let a = mlp_train(&cfg, &data).unwrap();
    let b = mlp_train(&cfg, &data).unwrap();
    assert_eq!(a.flat_params(), b.flat_params());
    assert_eq!(a.history, b.history);
    cfg.seed = 10;
    assert_ne!(mlp_train(&cfg, &data).unwrap().flat_params(), a.flat_params());
}

#[test]
fn untrained_model_is_at_chance() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 10_000;
    let points = Array2::from_shape_fn((n, 8), |_| rng.gen::<f64>());
    let labels: Vec<u32> = (0..n).map(|i| (i % 10) as u32).collect();
    let data = LabeledDataset::new(points, labels).unwrap();
    let mut cfg = MlpConfig::constant(8, 32, 2, 10);
    cfg.epochs = 0;
    let model = mlp_train(&cfg, &data).unwrap();
    assert_eq!(model.flat_params(), MlpModel::init(cfg).unwrap().flat_params());
    let acc = mlp_accuracy(&model, &data).unwrap();
    assert!((acc - 0.1).abs() <= 0.02, "accuracy {acc}");

    let two = fig1a(3);
    let mut cfg2 = MlpConfig::constant(2, 16, 3, 2);
    cfg2.epochs = 0;
    let acc2 = mlp_accuracy(&mlp_train(&cfg2, &two).unwrap(), &two).unwrap();
    assert!((acc2 - 0.5).abs() <= 0.1, "accuracy {acc2}");
}
