use onmar_core::clusterapp::{
    cluster_design_schema, generate_blobs, load_csv, stratified_two_folds, ClusterApp,
    ClusterFeatureExtractor, LabeledDataset,
};
use onmar_core::metalearners::{LearnerKind, MetaLearnerModel};
use onmar_core::rng::{child_rng, Stream};
use onmar_core::{
    offmar_run, onmar_run, train_design_model, GaEngine, GaParams, KnowledgeRepository, RunConfig,
    RunLog,
};

fn small_config(n: usize, kind: LearnerKind, seed: u64) -> RunConfig {
    let mut c = RunConfig::new(n, kind, seed);
    c.ga = GaParams {
        population_size: 8,
        generations: 3,
        ..GaParams::default()
    };
    c
}

fn data(seed: u64) -> LabeledDataset {
    generate_blobs(60, 3, 2, 8.0, &mut child_rng(seed, Stream::Dataset)).unwrap()
}

fn run(cfg: &RunConfig, d: &LabeledDataset) -> onmar_core::RunOutput {
    let mut app = ClusterApp::new(cfg.seed);
    let mut extractor = ClusterFeatureExtractor::new(16, cfg.seed);
    let mut engine = GaEngine::new(cfg.ga.clone(), cfg.seed);
    onmar_run(cfg, d, &mut app, &mut engine, &mut extractor).unwrap()
}

#[test]
fn onmar_run_on_clustering_is_reproducible() {
    for kind in LearnerKind::ALL {
        let cfg = small_config(8, kind, 5);
        let d = data(5);
        let a = run(&cfg, &d);
        let b = run(&cfg, &d);
        assert_eq!(a.log.without_timing(), b.log.without_timing());
        assert_eq!(a.repository, b.repository);
        assert_eq!(a.repository.len(), 9);
        assert_eq!(a.repository.feature_schema.len(), 60);
        for r in &a.log.records {
            assert!((0.0..=1.0).contains(&r.actual_performance));
            assert_eq!(r.predicted_performance.is_some(), r.timestep > cfg.theta_t);
        }
    }
}

#[test]
fn different_seeds_diverge() {
    let d = data(1);
    let a = run(&small_config(6, LearnerKind::Knn, 1), &d);
    let b = run(&small_config(6, LearnerKind::Knn, 2), &d);
    assert_ne!(a.log.without_timing(), b.log.without_timing());
}

#[test]
fn offmar_on_clustering_folds() {
    let d = data(3);
    let (f1, f2) = stratified_two_folds(&d, &mut child_rng(3, Stream::Folds)).unwrap();
    let mut cfg = small_config(6, LearnerKind::Rf, 3);
    cfg.theta_p = 0.0;
    let mut app = ClusterApp::new(3);
    let mut extractor = ClusterFeatureExtractor::new(16, 3);
    let mut engine = GaEngine::new(cfg.ga.clone(), 3);
    let out = offmar_run(&cfg, &f1, &f2, &mut app, &mut engine, &mut extractor).unwrap();
    assert_eq!(out.phase1.log.ga_calls(), 7);
    assert_eq!(out.pruned.len(), 7);
    assert!(!out.fell_back);
    assert_eq!(out.phase2.len(), 7);
    assert_eq!(out.phase2.ga_calls(), 0);
    let schema = cluster_design_schema();
    assert!(out.phase2.records.iter().all(|r| schema.is_valid(&r.design)));
}

#[test]
fn artifacts_roundtrip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(5, LearnerKind::Gbt, 9);
    let out = run(&cfg, &data(9));

    let log_path = dir.path().join("run.jsonl");
    out.log.save(&log_path).unwrap();
    assert_eq!(RunLog::load(&log_path).unwrap(), out.log);

    let kr_path = dir.path().join("kr.json");
    out.repository.save(&kr_path).unwrap();
    assert_eq!(KnowledgeRepository::load(&kr_path).unwrap(), out.repository);

    let model = train_design_model(&out.repository, &cfg).unwrap();
    let model_path = dir.path().join("model.json");
    model.save(&model_path).unwrap();
    let loaded = MetaLearnerModel::load(&model_path).unwrap();
    let features = &out.repository.entries[0].meta_features.values;
    assert_eq!(loaded.predict_design(features).unwrap(), model.predict_design(features).unwrap());
}

#[test]
fn csv_dataset_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("points.csv");
    let d = data(4);
    let mut text = String::from("x,y,label\n");
    for (row, label) in d.features.iter().zip(&d.labels) {
        text.push_str(&format!("{},{},c{label}\n", row[0], row[1]));
    }
    std::fs::write(&path, text).unwrap();
    let loaded = load_csv(&path, true).unwrap();
    assert_eq!(loaded.len(), 60);
    assert_eq!(loaded.classes(), 3);
    let out = run(&small_config(4, LearnerKind::Knn, 4), &loaded);
    assert_eq!(out.log.len(), 5);
}
