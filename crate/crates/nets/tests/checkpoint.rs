use gdv_core::synthetic::{generate_clusters, ClusterSpec};
use gdv_nets::{
    dbn_train_greedy, load_checkpoint, mlp_train, save_checkpoint, Checkpoint, DbnTrainConfig, MlpConfig,
};

#[test]
fn trained_models_survive_a_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate_clusters(&ClusterSpec::separated(4)).unwrap();
    let mut cfg = MlpConfig::constant(2, 8, 2, 2);
    cfg.epochs = 2;
    let mlp = Checkpoint::Mlp(mlp_train(&cfg, &data).unwrap());
    let path = dir.path().join("nested/mlp.gdvm");
    save_checkpoint(&path, &mlp).unwrap();
    assert_eq!(load_checkpoint(&path).unwrap(), mlp);

    let binary = data.points().mapv(|v| if v > 0.5 { 1.0 } else { 0.0 });
    let dcfg = DbnTrainConfig { epochs: 2, ..DbnTrainConfig::new(vec![2, 4, 3]) };
    let dbn = Checkpoint::Dbn(dbn_train_greedy(&binary, &dcfg).unwrap());
    let path = dir.path().join("dbn.gdvm");
    save_checkpoint(&path, &dbn).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], b"GDVM");
    assert_eq!(load_checkpoint(&path).unwrap(), dbn);
}
