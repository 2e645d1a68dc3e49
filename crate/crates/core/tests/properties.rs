use proptest::prelude::*;

use onmar_core::cluster_metrics::{clustering_accuracy, external_scores, pair_confusion};
use onmar_core::clusterapp::{
    cluster_design_schema, cluster_step, AssignRule, ClusterDesign, ClusterState, Init,
    LabeledDataset, UpdateRule, K_MAX, K_MIN,
};
use onmar_core::distance::Metric;
use onmar_core::metafeatures::latin_hypercube_sample;
use rand::SeedableRng;

fn labelings() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (2usize..40).prop_flat_map(|n| {
        (
            proptest::collection::vec(0usize..5, n),
            proptest::collection::vec(0usize..5, n),
        )
    })
}

fn design() -> impl Strategy<Value = ClusterDesign> {
    (
        0..Metric::ALL.len(),
        prop_oneof![Just(Init::UniformRandom), Just(Init::SamplePoints), Just(Init::SpreadMaximal)],
        prop_oneof![Just(AssignRule::HardNearest), Just(AssignRule::SoftmaxWeighted)],
        prop_oneof![Just(UpdateRule::Mean), Just(UpdateRule::Median), Just(UpdateRule::OnlineEta)],
        K_MIN..=K_MAX,
        0.01f64..=0.5,
    )
        .prop_map(|(m, init, assignment, update, k, eta)| ClusterDesign {
            metric: Metric::ALL[m],
            init,
            assignment,
            update,
            k,
            eta,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn accuracy_bounded_and_symmetric_in_relabeling((pred, truth) in labelings()) {
        let a = clustering_accuracy(&pred, &truth);
        prop_assert!(a >= 1.0 / pred.len() as f64 - 1e-12 && a <= 1.0);
        let shifted: Vec<usize> = pred.iter().map(|p| (p + 3) % 5).collect();
        prop_assert!((clustering_accuracy(&shifted, &truth) - a).abs() < 1e-12);
    }

    #[test]
    fn ari_is_symmetric_and_bounded((pred, truth) in labelings()) {
        let ab = external_scores(&pred, &truth).unwrap();
        let ba = external_scores(&truth, &pred).unwrap();
        prop_assert!((ab.ari - ba.ari).abs() < 1e-12);
        prop_assert!(ab.ari <= 1.0 + 1e-12);
        let c = pair_confusion(&pred, &truth);
        let t = pair_confusion(&truth, &pred);
        prop_assert_eq!(c[0][0], t[0][0]);
        prop_assert_eq!(c[1][1], t[1][1]);
    }

    #[test]
    fn design_encoding_roundtrips(d in design()) {
        let encoded = d.encode();
        prop_assert!(cluster_design_schema().is_valid(&encoded));
        prop_assert_eq!(ClusterDesign::decode(&encoded).unwrap(), d);
    }

    #[test]
    fn any_design_steps_without_empty_clusters(d in design(), seed in 0u64..1000) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let features: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..2).map(|_| rand::Rng::random_range(&mut rng, -3.0..3.0)).collect())
            .collect();
        let labels = (0..40).map(|i| i % 3).collect();
        let data = LabeledDataset::new("p", features, labels).unwrap();
        let mut state = ClusterState::new(seed);
        for _ in 0..3 {
            let (next, acc) = cluster_step(&state, &d, &data).unwrap();
            prop_assert!((0.0..=1.0).contains(&acc));
            let c = next.clustering.as_ref().unwrap();
            let mut sizes = vec![0; c.k];
            for &a in &c.assignments {
                sizes[a] += 1;
            }
            prop_assert!(sizes.iter().all(|&s| s > 0));
            state = next;
        }
    }

    #[test]
    fn lhs_points_stay_in_bounds(n in 1usize..50, lo in -5.0f64..5.0, width in 0.1f64..10.0, seed in 0u64..1000) {
        let bounds = vec![(lo, lo + width); 3];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pts = latin_hypercube_sample(n, &bounds, &mut rng).unwrap();
        prop_assert_eq!(pts.len(), n);
        prop_assert!(pts.iter().flatten().all(|&v| v >= lo && v < lo + width));
    }
}
