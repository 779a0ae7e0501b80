use std::path::PathBuf;

use gdv_core::io::load_mnist;
use gdv_core::LabeledDataset;
use gdv_nets::dream::{min_max_normalize, IMAGE_SIDE};
use gdv_nets::{
    dbn_layer_representation, dbn_train_greedy, prototype_reconstruct, rbm_train_cd, sparse_count, sparsify_top,
    DbnModel, DbnTrainConfig, NetError, RbmParams, RbmTrainConfig,
};
use ndarray::{Array1, Array2, Axis};

fn digits(n: usize) -> LabeledDataset {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist");
    let all = load_mnist(root.join("images-idx3-ubyte.gz"), root.join("labels-idx1-ubyte.gz")).unwrap();
    all.select(&(0..n).collect::<Vec<_>>()).unwrap()
}

fn zero_rbm(visible: usize, hidden: usize) -> RbmParams {
    RbmParams {
        weights: Array2::zeros((hidden, visible)),
        visible_bias: Array1::zeros(visible),
        hidden_bias: Array1::zeros(hidden),
    }
}

#[test]
fn zero_rbm_assigns_one_half() {
    let rbm = zero_rbm(5, 7);
    let v = Array2::from_shape_fn((4, 5), |(i, j)| ((i * j) % 3) as f64 / 2.0);
    assert!(rbm.hidden_probs(&v).iter().all(|&p| p == 0.5));
}

#[test]
fn total_input_is_linear_in_the_visible_state() {
    let rbm = RbmParams::init(6, 4, 0.7, 12);
    let y = Array2::from_shape_fn((3, 6), |(i, j)| (i as f64 - j as f64) * 0.37);
    let z = |v: &Array2<f64>| v.dot(&rbm.weights.t());
    let doubled = &y * 2.0;
    assert_eq!(z(&doubled), z(&y) * 2.0);
}

#[test]
fn single_pattern_reconstruction_improves() {
    let pattern: Vec<f64> = (0..20).map(|j| if j % 3 == 0 { 1.0 } else { 0.0 }).collect();
    let data = Array2::from_shape_fn((50, 20), |(_, j)| pattern[j]);
    let probe = data.slice(ndarray::s![0..1, ..]).to_owned();
    let errors: Vec<f64> = (0..=10)
        .map(|e| {
            let cfg = RbmTrainConfig { hidden: 8, epochs: e, batch_size: 10, seed: 4, ..Default::default() };
            rbm_train_cd(&data, &cfg).unwrap().params.reconstruction_error(&probe).unwrap()
        })
        .collect();
    let smoothed: Vec<f64> = errors.windows(3).map(|w| w.iter().sum::<f64>() / 3.0).collect();
    assert!(smoothed.windows(2).all(|w| w[1] < w[0]), "{smoothed:?}");
}

#[test]
fn greedy_training_chains_shapes() {
    let data = digits(100);
    let cfg = DbnTrainConfig { epochs: 1, seed: 3, ..DbnTrainConfig::new(vec![784, 256, 256]) };
    let model = dbn_train_greedy(data.points(), &cfg).unwrap();
    assert_eq!(model.depth(), 2);
    assert_eq!(model.widths(), vec![784, 256, 256]);
    assert_eq!(model.layers[0].n_hidden(), model.layers[1].n_visible());
    assert_eq!(dbn_layer_representation(&model, &data, 2).unwrap().n_dims(), 256);
}

#[test]
fn one_layer_dbn_is_a_single_rbm() {
    let data = digits(60);
    let cfg = DbnTrainConfig { epochs: 2, seed: 17, ..DbnTrainConfig::new(vec![784, 32]) };
    let dbn = dbn_train_greedy(data.points(), &cfg).unwrap();
    let rbm = rbm_train_cd(data.points(), &cfg.layer_config(0)).unwrap();
    assert_eq!(dbn.layers[0], rbm.params);
}

#[test]
fn representations() {
    let data = digits(40);
    let cfg = DbnTrainConfig { epochs: 1, seed: 5, ..DbnTrainConfig::new(vec![784, 30, 20]) };
    let model = dbn_train_greedy(data.points(), &cfg).unwrap();
    assert_eq!(dbn_layer_representation(&model, &data, 0).unwrap(), data);
    let a = dbn_layer_representation(&model, &data, 2).unwrap();
    let b = dbn_layer_representation(&model, &data, 2).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.labels(), data.labels());
    assert!(matches!(
        dbn_layer_representation(&model, &data, 3),
        Err(NetError::LayerOutOfRange { layer: 3, depth: 2 })
    ));

    let zero = DbnModel::from_layers(vec![zero_rbm(784, 10), zero_rbm(10, 4)]).unwrap();
    for l in 1..=2 {
        assert!(dbn_layer_representation(&zero, &data, l).unwrap().points().iter().all(|&p| p == 0.5));
    }
}

#[test]
fn sparsification_of_a_width_20_layer_keeps_two_units() {
    let activity: Vec<f64> = (0..20).map(|i| ((i * 7) % 20) as f64 / 20.0).collect();
    let s = sparsify_top(&activity);
    assert_eq!(s.iter().filter(|&&v| v == 1.0).count(), 2);
    assert_eq!(s.iter().filter(|&&v| v == 0.0).count(), 18);
    for w in [1, 9, 10, 11, 64, 256, 1000] {
        assert_eq!(sparse_count(w), w.div_ceil(10));
        assert_eq!(sparsify_top(&vec![0.3; w]).iter().filter(|&&v| v == 1.0).count(), sparse_count(w));
    }
}

#[test]
fn prototypes() {
    let data = digits(200);
    let cfg = DbnTrainConfig { epochs: 1, seed: 2, ..DbnTrainConfig::new(vec![784, 20, 20]) };
    let model = dbn_train_greedy(data.points(), &cfg).unwrap();

    let class = data.labels()[0];
    let members: Vec<usize> = (0..data.n_points()).filter(|&i| data.labels()[i] == class).collect();
    let mean = data.points().select(Axis(0), &members).mean_axis(Axis(0)).unwrap();
    let p0 = prototype_reconstruct(&model, 0, class, &data).unwrap();
    assert_eq!(p0.pixels.dim(), (IMAGE_SIDE, IMAGE_SIDE));
    assert_eq!(p0.flat(), min_max_normalize(&mean));

    let one = data.select(&[0]).unwrap();
    let p2 = prototype_reconstruct(&model, 2, class, &one).unwrap();
    let act = model.propagate_up(one.points(), 2).unwrap();
    let sparse = Array2::from_shape_vec((1, 20), sparsify_top(&act.row(0).to_vec())).unwrap();
    let ip = model.propagate_down(&sparse, 2).unwrap();
    assert_eq!(p2.flat(), min_max_normalize(&ip.row(0).to_owned()));
    assert!(p2.pixels.iter().all(|&v| (0.0..=1.0).contains(&v)));

    let absent = (0..10).find(|c| !one.labels().contains(c)).unwrap();
    assert!(matches!(prototype_reconstruct(&model, 1, absent, &one), Err(NetError::NoClassImages(c)) if c == absent));
    assert!(matches!(prototype_reconstruct(&model, 3, class, &one), Err(NetError::LayerOutOfRange { .. })));
}
