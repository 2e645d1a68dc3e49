//! End-to-end acceptance checks. Prints one pass/fail line per criterion and
//! exits non-zero if any fails.

use std::cell::Cell;
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use onmar_bench::analysis::{diagnose, DEFAULT_DELTA, DEFAULT_WINDOW};
use onmar_bench::experiment::{run_experiment, Approach, DatasetSource, ExperimentSpec, RunResult};
use onmar_bench::stats::{mann_whitney_u, Alternative};
use onmar_core::cluster_metrics::{
    clustering_accuracy, external_scores, internal_scores, pair_confusion, Clustering,
};
use onmar_core::clusterapp::{
    cluster_step, generate_blobs, stratified_two_folds, ClusterApp, ClusterDesign,
    ClusterFeatureExtractor, ClusterState, LabeledDataset,
};
use onmar_core::metafeatures::{
    block_entropy, ela_information_content, ela_meta_model, ela_nbc, latin_hypercube_sample,
    symbols, tour_differences, LandscapeSample,
};
use onmar_core::metalearners::{
    fit, Forest, ForestParams, Gbt, GbtParams, Hyper, KnnModel, LearnerKind, Task,
};
use onmar_core::rng::{child_rng, Stream};
use onmar_core::{
    kr_prune, offmar_run, onmar_run, Design, DesignEngine, GaEngine, GeneSchema, Result, RunConfig,
    RunLog, RunOutput,
};

const N: usize = 100;
const THETA_T: usize = 50;
const THETA_P: f64 = 0.85;
const SEEDS: u64 = 10;
const REPEATS: usize = 30;
const MAX_RUN_SECONDS: f64 = 120.0;

/// Forwards to an inner engine and counts invocations.
struct CountingEngine<E> {
    inner: E,
    calls: Cell<usize>,
}

impl<E: DesignEngine> DesignEngine for CountingEngine<E> {
    fn reset(&mut self, seed: u64) {
        self.inner.reset(seed);
    }

    fn create_design(
        &mut self,
        schema: &GeneSchema,
        fitness: &dyn Fn(&Design) -> f64,
        t: usize,
    ) -> Result<Design> {
        self.calls.set(self.calls.get() + 1);
        self.inner.create_design(schema, fitness, t)
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn blobs(seed: u64) -> LabeledDataset {
    generate_blobs(200, 3, 4, 8.0, &mut child_rng(seed, Stream::Dataset)).unwrap()
}

fn config(seed: u64) -> RunConfig {
    let mut c = RunConfig::new(N, LearnerKind::Gbt, seed);
    c.theta_t = THETA_T;
    c.theta_p = THETA_P;
    c
}

struct FidelityRun {
    output: RunOutput,
    engine_calls: usize,
    seconds: f64,
}

fn fidelity_run(seed: u64) -> FidelityRun {
    let cfg = config(seed);
    let data = blobs(seed);
    let mut app = ClusterApp::new(seed);
    let mut extractor = ClusterFeatureExtractor::new(64, seed);
    let mut engine = CountingEngine { inner: GaEngine::new(cfg.ga.clone(), seed), calls: Cell::new(0) };
    let start = Instant::now();
    let output = onmar_run(&cfg, &data, &mut app, &mut engine, &mut extractor).unwrap();
    FidelityRun { output, engine_calls: engine.calls.get(), seconds: start.elapsed().as_secs_f64() }
}

fn criterion_1(runs: &[FidelityRun]) -> Outcome {
    let mut failures = Vec::new();
    for (seed, run) in runs.iter().enumerate() {
        let log = &run.output.log;
        let gated_skips = log
            .records
            .iter()
            .filter(|r| r.predicted_performance.is_some_and(|p| p >= THETA_P))
            .count();
        let identity = run.engine_calls == log.ga_calls() && log.ga_calls() + gated_skips == N + 1;
        let rule = log.records.iter().all(|r| {
            let expect_ga = r.timestep <= THETA_T || r.predicted_performance.is_some_and(|p| p < THETA_P);
            let expect_pred = r.timestep > THETA_T;
            r.ga_invoked == expect_ga && r.predicted_performance.is_some() == expect_pred
        });
        let sizes = log.len() == N + 1 && run.output.repository.len() == N + 1;
        if !(identity && rule && sizes && run.seconds < MAX_RUN_SECONDS) {
            failures.push(format!(
                "seed {seed}: identity {identity}, gating {rule}, sizes {sizes}, {:.1}s",
                run.seconds
            ));
        }
    }
    let slowest = runs.iter().map(|r| r.seconds).fold(0.0, f64::max);
    let calls: Vec<usize> = runs.iter().map(|r| r.engine_calls).collect();
    if failures.is_empty() {
        outcome(true, format!("{SEEDS} seeds, engine calls {calls:?}, slowest run {slowest:.1}s"))
    } else {
        outcome(false, failures.join("; "))
    }
}

fn median(v: &[f64]) -> f64 {
    onmar_bench::experiment::median(v).unwrap_or(f64::NAN)
}

fn by_approach(runs: &[RunResult], a: Approach) -> Vec<&RunResult> {
    let mut v: Vec<&RunResult> = runs.iter().filter(|r| r.summary.approach == a).collect();
    v.sort_by_key(|r| r.summary.repeat);
    v
}

fn criterion_2(runs: &[RunResult]) -> Outcome {
    let base = by_approach(runs, Approach::Baseline);
    let onmar = by_approach(runs, Approach::Onmar(LearnerKind::Gbt));
    let offmar = by_approach(runs, Approach::Offmar(LearnerKind::Gbt));
    if base.len() != REPEATS || onmar.len() != REPEATS || offmar.len() != REPEATS {
        return outcome(false, "incomplete runs");
    }
    let secs = |v: &[&RunResult]| v.iter().map(|r| r.summary.wall_seconds).collect::<Vec<_>>();
    let (mb, mo, mf) = (median(&secs(&base)), median(&secs(&onmar)), median(&secs(&offmar)));
    let fewer = onmar
        .iter()
        .zip(&base)
        .filter(|(o, b)| o.summary.ga_calls < b.summary.ga_calls)
        .count();
    let frac = fewer as f64 / REPEATS as f64;
    let pass = mo < mb && frac >= 0.8 && mf > mb;
    outcome(
        pass,
        format!(
            "median seconds onmar_gbt {mo:.2} vs baseline {mb:.2}; fewer engine calls in {fewer}/{REPEATS}; offmar_gbt total {mf:.2} vs baseline {mb:.2}"
        ),
    )
}

fn criterion_3(runs: &[RunResult]) -> Outcome {
    let acc = |a| by_approach(runs, a).iter().map(|r| r.summary.final_accuracy).collect::<Vec<_>>();
    let (o, b) = (acc(Approach::Onmar(LearnerKind::Gbt)), acc(Approach::Baseline));
    let p = mann_whitney_u(&o, &b, Alternative::TwoSided).unwrap().p;
    let (mo, mb) = (median(&o), median(&b));
    outcome(p > 0.05 || mo >= mb, format!("p = {p:.4}, median accuracy onmar_gbt {mo:.4} vs baseline {mb:.4}"))
}

fn brute_knn(x: &[Vec<f64>], y: &[f64], q: &[f64], k: usize) -> (Vec<usize>, f64) {
    let n = x.len();
    let w = x[0].len();
    let mut z = vec![(0.0, 1.0); w];
    for (j, zj) in z.iter_mut().enumerate() {
        let m = x.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let var = x.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n as f64;
        *zj = (m, if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 });
    }
    let norm = |r: &[f64]| r.iter().zip(&z).map(|(v, (m, s))| (v - m) / s).collect::<Vec<_>>();
    let qn = norm(q);
    let mut d: Vec<(f64, usize)> = x
        .iter()
        .enumerate()
        .map(|(i, r)| (norm(r).iter().zip(&qn).map(|(a, b)| (a - b).powi(2)).sum::<f64>(), i))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let idx: Vec<usize> = d[..k.min(n)].iter().map(|p| p.1).collect();
    let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64;
    (idx, mean)
}

/// Best total agreement over partial injective maps from predicted
/// clusters to classes, by exhaustive search.
fn brute_accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    let kp = pred.iter().max().unwrap() + 1;
    let kt = truth.iter().max().unwrap() + 1;
    let mut counts = vec![vec![0usize; kt]; kp];
    for (p, t) in pred.iter().zip(truth) {
        counts[*p][*t] += 1;
    }
    fn search(c: usize, counts: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
        if c == counts.len() {
            return 0;
        }
        let mut best = search(c + 1, counts, used);
        for t in 0..used.len() {
            if !used[t] {
                used[t] = true;
                best = best.max(counts[c][t] + search(c + 1, counts, used));
                used[t] = false;
            }
        }
        best
    }
    search(0, &counts, &mut vec![false; kt]) as f64 / pred.len() as f64
}

fn lloyd_oracle(x: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, Vec<Vec<f64>>) {
    let labels: Vec<usize> = x
        .iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, c) in centroids.iter().enumerate() {
                let d: f64 = p.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum();
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            best
        })
        .collect();
    let mut sums = vec![vec![0.0; x[0].len()]; centroids.len()];
    let mut counts = vec![0usize; centroids.len()];
    for (p, &l) in x.iter().zip(&labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    let next = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| s.into_iter().map(|v| v / c as f64).collect())
        .collect();
    (labels, next)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut knn_ok = 0;
    for _ in 0..100 {
        let n = rng.random_range(5..60);
        let w = rng.random_range(1..8);
        let k = rng.random_range(1..=7);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..w).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let q: Vec<f64> = (0..w).map(|_| rng.random_range(-3.0..3.0)).collect();
        let model = KnnModel::fit(&x, &y, k);
        let (idx, mean) = brute_knn(&x, &y, &q, k);
        if model.neighbours(&q) == idx && (model.predict_mean(&q) - mean).abs() <= 1e-12 {
            knn_ok += 1;
        }
    }

    let mut acc_ok = 0;
    for _ in 0..100 {
        let n = rng.random_range(2..40);
        let kp = rng.random_range(1..=6);
        let kt = rng.random_range(1..=6);
        let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..kp)).collect();
        let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..kt)).collect();
        if (clustering_accuracy(&pred, &truth) - brute_accuracy(&pred, &truth)).abs() <= 1e-12 {
            acc_ok += 1;
        }
    }

    let mut lloyd_ok = 0;
    for i in 0..50 {
        let n = rng.random_range(10..80);
        let d = rng.random_range(1..6);
        let k = rng.random_range(2..=6);
        let features: Vec<Vec<f64>> =
            (0..n).map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let data = LabeledDataset::new("lloyd", features, labels).unwrap();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let start: Vec<Vec<f64>> = idx[..k].iter().map(|&j| data.features[j].clone()).collect();
        let (expect_labels, expect_centroids) = lloyd_oracle(&data.features, &start);
        let state = ClusterState::with_centroids(i, start);
        let (next, _) = cluster_step(&state, &ClusterDesign::lloyd(k), &data).unwrap();
        let got = next.clustering.unwrap();
        let close = got
            .centroids
            .iter()
            .flatten()
            .zip(expect_centroids.iter().flatten())
            .all(|(a, b)| (a - b).abs() <= 1e-9);
        if got.assignments == expect_labels && close {
            lloyd_ok += 1;
        }
    }
    outcome(
        knn_ok == 100 && acc_ok == 100 && lloyd_ok == 50,
        format!("kNN {knn_ok}/100, clustering accuracy {acc_ok}/100, Lloyd step {lloyd_ok}/50"),
    )
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    for n in 2..=10usize {
        for m in 1..n {
            let masks: Vec<u32> = (0u32..1 << n).filter(|s| s.count_ones() as usize == m).collect();
            // U of a split of values 0..n: pairs (a_i, b_j) with a_i > b_j
            let u_of = |mask: u32| -> usize {
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| (0..i).filter(|j| mask & (1 << j) == 0).count())
                    .sum()
            };
            let null: Vec<usize> = masks.iter().map(|&s| u_of(s)).collect();
            let total = null.len() as f64;
            for (&mask, &u) in masks.iter().zip(&null) {
                let a: Vec<f64> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i as f64).collect();
                let b: Vec<f64> = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| i as f64).collect();
                let le = null.iter().filter(|&&v| v <= u).count() as f64 / total;
                let ge = null.iter().filter(|&&v| v >= u).count() as f64 / total;
                for (alt, want) in [
                    (Alternative::Less, le),
                    (Alternative::Greater, ge),
                    (Alternative::TwoSided, (2.0 * le.min(ge)).min(1.0)),
                ] {
                    let r = mann_whitney_u(&a, &b, alt).unwrap();
                    checked += 1;
                    if !r.exact || (r.p - want).abs() > 1e-12 || r.u != u as f64 {
                        bad += 1;
                    }
                }
            }
        }
    }
    let worked = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::Less).unwrap();
    outcome(
        bad == 0 && worked.p == 0.05,
        format!("{} of {checked} enumerated p-values match; worked example p = {}", checked - bad, worked.p),
    )
}

fn criterion_6() -> Outcome {
    let truth = [0, 0, 1, 1];
    let pred = [0, 1, 0, 1];
    let ari = external_scores(&pred, &truth).unwrap().ari;
    let pc = pair_confusion(&pred, &truth);
    let acc = clustering_accuracy(&pred, &truth);
    let hand = ari == -0.5 && pc == [[0, 2], [2, 2]] && acc == 0.5;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut sil_ok, mut perm_ok, mut pair_ok) = (0, 0, 0);
    for _ in 0..1000 {
        let n = rng.random_range(3..40);
        let d = rng.random_range(1..4);
        let k = rng.random_range(2..6);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();

        let mut centroids = vec![vec![0.0; d]; k];
        let mut counts = vec![0.0; k];
        for (p, &l) in x.iter().zip(&labels) {
            counts[l] += 1.0;
            for (c, v) in centroids[l].iter_mut().zip(p) {
                *c += v;
            }
        }
        for (c, &m) in centroids.iter_mut().zip(&counts) {
            if m > 0.0 {
                c.iter_mut().for_each(|v| *v /= m);
            }
        }
        let s = internal_scores(&x, &Clustering::new(labels.clone(), centroids)).silhouette;
        if s.is_none_or(|s| (-1.0..=1.0).contains(&s)) {
            sil_ok += 1;
        }

        let mut relabel: Vec<usize> = (0..k).collect();
        relabel.shuffle(&mut rng);
        let renamed: Vec<usize> = labels.iter().map(|&l| relabel[l]).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let shuffled_pred: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
        let shuffled_truth: Vec<usize> = order.iter().map(|&i| truth[i]).collect();
        let base = external_scores(&labels, &truth).unwrap();
        let same = |p: &[usize], t: &[usize]| {
            let e = external_scores(p, t).unwrap();
            (e.ari - base.ari).abs() < 1e-12
                && (e.ami - base.ami).abs() < 1e-9
                && (e.v_measure - base.v_measure).abs() < 1e-12
                && (e.fowlkes_mallows - base.fowlkes_mallows).abs() < 1e-12
                && (clustering_accuracy(p, t) - clustering_accuracy(&labels, &truth)).abs() < 1e-12
                && pair_confusion(p, t) == pair_confusion(&labels, &truth)
        };
        if same(&renamed, &truth) && same(&shuffled_pred, &shuffled_truth) {
            perm_ok += 1;
        }

        let total: u64 = pair_confusion(&labels, &truth).iter().flatten().sum();
        if total == (n * (n - 1) / 2) as u64 {
            pair_ok += 1;
        }
    }
    outcome(
        hand && sil_ok == 1000 && perm_ok == 1000 && pair_ok == 1000,
        format!(
            "hand example ARI {ari}, pairs {pc:?}, accuracy {acc}; silhouette range {sil_ok}/1000, permutation invariance {perm_ok}/1000, pair sum {pair_ok}/1000"
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut r2_ok = 0;
    for _ in 0..50 {
        let n = rng.random_range(20..80);
        let d = rng.random_range(1..5);
        let coef: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect();
        let ys = xs.iter().map(|x| 0.3 + x.iter().zip(&coef).map(|(a, b)| a * b).sum::<f64>()).collect();
        let mm = ela_meta_model(&LandscapeSample::from_points(xs, ys)).unwrap();
        if mm.r2_lin_adj.is_some_and(|r| (r - 1.0).abs() <= 1e-9) {
            r2_ok += 1;
        }
    }

    // evenly spaced points on a line: the tour visits them in order
    let (mut h_ok, mut h0_ok) = (0, 0);
    for _ in 0..50 {
        let n = rng.random_range(5..60);
        let step = rng.random_range(0.01..1.0);
        let xs: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        let ys: Vec<f64> = (0..n).map(|i| step * i as f64).collect();
        let ic = ela_information_content(&LandscapeSample::from_points(xs.clone(), ys)).unwrap();
        if ic.h_max == 0.0 {
            h_ok += 1;
        }
        let mut increments: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut acc = 0.0;
        for v in &mut increments {
            acc += *v;
            *v = acc;
        }
        let diffs = tour_differences(&LandscapeSample::from_points(xs, increments));
        if block_entropy(&symbols(&diffs, 0.0)) == 0.0 {
            h0_ok += 1;
        }
    }

    let mut lhs_ok = 0;
    for seed in 0..100u64 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let n = r.random_range(1..100);
        let d = r.random_range(1..6);
        let bounds: Vec<(f64, f64)> = (0..d)
            .map(|_| {
                let lo = r.random_range(-10.0..10.0);
                (lo, lo + r.random_range(0.1..20.0))
            })
            .collect();
        let pts = latin_hypercube_sample(n, &bounds, &mut r).unwrap();
        let exact = bounds.iter().enumerate().all(|(j, &(lo, hi))| {
            let mut occ = vec![0; n];
            for p in &pts {
                let s = ((p[j] - lo) / (hi - lo) * n as f64).floor() as usize;
                if s < n {
                    occ[s] += 1;
                }
            }
            occ.iter().all(|&c| c == 1)
        });
        if exact {
            lhs_ok += 1;
        }
    }

    let nbc = ela_nbc(&LandscapeSample::from_points(
        vec![vec![0.0], vec![1.0], vec![2.0]],
        vec![0.1, 0.2, 0.3],
    ))
    .unwrap();
    let nbc_ok = nbc.mean_ratio.is_some_and(|m| (m - 4.0 / 3.0).abs() < 1e-12);
    outcome(
        r2_ok == 50 && h_ok == 50 && h0_ok == 50 && lhs_ok == 100 && nbc_ok,
        format!(
            "r2_lin_adj {r2_ok}/50; h_max on evenly spaced monotone Y {h_ok}/50, zero-tolerance entropy on monotone Y {h0_ok}/50; LHS occupancy {lhs_ok}/100; NBC mean_ratio {:?}",
            nbc.mean_ratio
        ),
    )
}

fn criterion_8(repository_source: &RunOutput) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut gbt_ok = 0;
    let mut rf_ok = 0;
    for _ in 0..20 {
        let n = rng.random_range(10..60);
        let w = rng.random_range(1..6);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..w).map(|_| rng.random::<f64>()).collect()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let params = GbtParams::default();
        let model = Gbt::fit(&x, &y, &params, &mut ChaCha8Rng::seed_from_u64(1));
        let mse = |r: usize| {
            x.iter().zip(&y).map(|(row, t)| (model.predict_rounds(row, r) - t).powi(2)).sum::<f64>() / n as f64
        };
        let curve: Vec<f64> = (0..=params.rounds).map(mse).collect();
        if curve.windows(2).all(|p| p[1] <= p[0] + 1e-12) {
            gbt_ok += 1;
        }
        let forest = Forest::fit(&x, &y, &ForestParams::default(), Task::Regression, &mut ChaCha8Rng::seed_from_u64(2));
        let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let within = (0..50).all(|_| {
            let q: Vec<f64> = (0..w).map(|_| rng.random_range(-1.0..2.0)).collect();
            let p = forest.predict(&q);
            p >= lo && p <= hi
        });
        if within {
            rf_ok += 1;
        }
    }

    let kr = &repository_source.repository;
    let mut deterministic = true;
    for kind in LearnerKind::ALL {
        for matrix in [kr.performance_matrix().unwrap(), kr.design_matrix().unwrap()] {
            let a = fit(kind, &matrix, &Hyper::default(), 11).unwrap().to_json().unwrap();
            let b = fit(kind, &matrix, &Hyper::default(), 11).unwrap().to_json().unwrap();
            deterministic &= a == b;
        }
    }
    outcome(
        gbt_ok == 20 && rf_ok == 20 && deterministic,
        format!("GBT monotone training MSE {gbt_ok}/20; RF within target range {rf_ok}/20; same-seed refits identical: {deterministic}"),
    )
}

fn criterion_9() -> Outcome {
    let seed = 9;
    let cfg = config(seed);
    let data = blobs(seed);
    let (fold1, fold2) = stratified_two_folds(&data, &mut child_rng(seed, Stream::Folds)).unwrap();
    let mut app = ClusterApp::new(seed);
    let mut extractor = ClusterFeatureExtractor::new(64, seed);
    let mut engine = CountingEngine { inner: GaEngine::new(cfg.ga.clone(), seed), calls: Cell::new(0) };
    let out = offmar_run(&cfg, &fold1, &fold2, &mut app, &mut engine, &mut extractor).unwrap();

    let entries = out.phase1.repository.len();
    let expected: Vec<f64> = out
        .phase1
        .repository
        .entries
        .iter()
        .map(|e| e.performance)
        .filter(|&p| p >= THETA_P)
        .collect();
    let pruned: Vec<f64> = match kr_prune(&out.phase1.repository, THETA_P) {
        Ok(kr) => kr.entries.iter().map(|e| e.performance).collect(),
        Err(_) => Vec::new(),
    };
    // a mixed repository exercises the filter on both sides of the threshold
    let mut mixed = out.phase1.repository.clone();
    let levels = [0.2, 0.85, 0.84999, 0.9, 1.0, 0.5];
    for (e, p) in mixed.entries.iter_mut().zip(levels.iter().cycle()) {
        e.performance = *p;
    }
    let mixed_expected: Vec<usize> = (0..mixed.len()).filter(|&i| mixed.entries[i].performance >= THETA_P).collect();
    let mixed_kept = kr_prune(&mixed, THETA_P).unwrap();
    let mixed_ok = mixed_kept.entries.len() == mixed_expected.len()
        && mixed_kept
            .entries
            .iter()
            .zip(&mixed_expected)
            .all(|(e, &i)| e == &mixed.entries[i]);

    let phase1_calls = out.phase1.log.ga_calls();
    let phase2_calls = engine.calls.get() - phase1_calls;
    let pass = entries == N + 1
        && pruned == expected
        && mixed_ok
        && phase1_calls == N + 1
        && phase2_calls == 0
        && out.phase2.ga_calls() == 0;
    outcome(
        pass,
        format!(
            "phase 1 entries {entries}; pruning kept {} of {entries} (mixed check {mixed_ok}); engine calls phase 1 {phase1_calls}, phase 2 {phase2_calls}",
            pruned.len()
        ),
    )
}

fn criterion_10(healthy: &[&RunLog]) -> Outcome {
    let mut bad = RunLog::default();
    let template = &healthy[0].records[0];
    for t in 0..30 {
        let mut r = template.clone();
        r.timestep = t;
        r.ga_invoked = t < 5;
        r.predicted_performance = (t >= 5).then_some(0.95);
        r.actual_performance = 0.4;
        bad.records.push(r);
    }
    let fires = diagnose(&bad, DEFAULT_DELTA, DEFAULT_WINDOW).flagged;
    let quiet = healthy.iter().filter(|l| !diagnose(l, DEFAULT_DELTA, DEFAULT_WINDOW).flagged).count();
    outcome(
        fires && quiet >= 9,
        format!("pathological log flagged: {fires}; healthy runs not flagged {quiet}/{}", healthy.len()),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut report = |i: usize, o: Outcome| {
        println!("criterion {i} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((i, o));
    };

    let fidelity: Vec<FidelityRun> = (0..SEEDS).map(fidelity_run).collect();
    report(1, criterion_1(&fidelity));

    let mut spec = ExperimentSpec::new(
        vec![Approach::Baseline, Approach::Onmar(LearnerKind::Gbt), Approach::Offmar(LearnerKind::Gbt)],
        DatasetSource::Blobs { n: 200, k: 3, d: 4, separation: 8.0 },
        config(2024),
    );
    spec.repeats = REPEATS;
    let (_, runs) = run_experiment(&spec).unwrap();
    report(2, criterion_2(&runs));
    report(3, criterion_3(&runs));
    report(4, criterion_4());
    report(5, criterion_5());
    report(6, criterion_6());
    report(7, criterion_7());
    report(8, criterion_8(&fidelity[0].output));
    report(9, criterion_9());
    let healthy: Vec<&RunLog> = fidelity.iter().map(|r| &r.output.log).collect();
    report(10, criterion_10(&healthy));

    let failed: Vec<usize> = results.iter().filter(|r| !r.1.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
