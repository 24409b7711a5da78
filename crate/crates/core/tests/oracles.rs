mod common;

use aucslice_core::attribution::{self, PairSample};
use aucslice_core::dataset::{split_dataset, EvalDataset, EvalRecord, FeatureKind, Partition, SchemaConfig};
use aucslice_core::metrics;
use aucslice_core::pairs::{self, CrossStatistic};
use aucslice_core::segmentation::{FeatureData, FeatureMatrix, SegmentTree, TreeParams};
use aucslice_core::stats::{self, PValueMethod, SampleSummary};
use common::{brute_force_auc, brute_force_totals, brute_force_u, random_dataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

#[test]
fn auc_routes_agree_with_pair_enumeration() {
    for seed in 0..300 {
        let d = random_dataset(seed, 120);
        let labels = d.labels();
        let scores = d.scores("m").unwrap();
        let brute = brute_force_auc(&labels, &scores);
        let ranked = metrics::auc(&d, "m").unwrap();
        let area = metrics::roc_curve(&d, "m").unwrap().area();
        assert!((ranked - brute).abs() <= 1e-12, "seed {seed}: {ranked} vs {brute}");
        assert!((area - brute).abs() <= 1e-12, "seed {seed}: {area} vs {brute}");
    }
}

#[test]
fn example_attributions_match_enumeration() {
    for seed in 0..300 {
        let d = random_dataset(seed, 120);
        let labels = d.labels();
        let scores = d.scores("m").unwrap();
        let brute = brute_force_totals(&labels, &scores);
        let fast = attribution::example_attributions(&d, "m").unwrap();
        let (p, n) = (d.positives() as f64, d.negatives() as f64);
        for (a, b) in fast.iter().zip(&brute) {
            assert!((a.total - b).abs() <= 1e-12);
            let opposite = if a.positive { n } else { p };
            assert!((a.normalized - b / opposite).abs() <= 1e-12);
        }
    }
}

#[test]
fn sampled_pairs_sum_to_u_of_the_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for seed in 0..50 {
        let d = random_dataset(seed, 200);
        let sample = PairSample {
            max_pos: rng.random_range(1..30),
            max_neg: rng.random_range(1..30),
            seed,
        };
        let pairs = attribution::pair_attributions(&d, "m", Some(sample)).unwrap();
        let mut members: Vec<usize> = pairs.iter().flat_map(|p| [p.pos_index, p.neg_index]).collect();
        members.sort_unstable();
        members.dedup();
        let sub = d.subset(&members);
        let sum: f64 = pairs.iter().map(|p| p.credit).sum();
        let expected = metrics::auc(&sub, "m").unwrap() * (sub.positives() * sub.negatives()) as f64;
        assert!((sum - expected).abs() < 1e-9);
        assert_eq!(pairs.len(), sub.positives() * sub.negatives());
    }
}

#[test]
fn fifty_record_pairs_match_ranked_auc() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let labels: Vec<bool> = (0..50).map(|i| i % 2 == 0 || rng.random_bool(0.3)).collect();
    let scores: Vec<f64> = (0..50).map(|_| rng.random_range(0..10) as f64 / 10.0).collect();
    let pairs = attribution::pair_attributions_from_scores(&labels, &scores, None).unwrap();
    let p = labels.iter().filter(|&&l| l).count();
    let sum: f64 = pairs.iter().map(|p| p.credit).sum();
    let auc = metrics::auc_from_scores(&labels, &scores).unwrap();
    assert!((sum / (p * (50 - p)) as f64 - auc).abs() < 1e-12);
    assert_eq!(sum, brute_force_u(&labels, &scores));
}

#[test]
fn split_of_ten_thousand_records() {
    let schema = SchemaConfig::new("y", [("m", "s")]);
    let records = (0..10_000)
        .map(|i| EvalRecord::new((i % 2) as u8, vec![0.5], vec![]))
        .collect();
    let d = EvalDataset::new(schema, records).unwrap();
    let (a, b) = split_dataset(&d, 0.5, 1).unwrap();
    assert_eq!((a.len(), b.len()), (5_000, 5_000));
    assert_eq!(a.len() + b.len(), d.records().len());
}

/// Mean of `targets` over a set of rows.
fn mean_of(targets: &[f64], rows: &[usize]) -> f64 {
    rows.iter().map(|&r| targets[r]).sum::<f64>() / rows.len() as f64
}

fn sse(targets: &[f64], rows: &[usize]) -> f64 {
    let m = mean_of(targets, rows);
    rows.iter().map(|&r| (targets[r] - m).powi(2)).sum()
}

/// Best variance reduction at the root by exhaustive enumeration of every
/// candidate partition, with missing values routed left.
fn exhaustive_best_gain(targets: &[f64], features: &FeatureMatrix, min_leaf: usize) -> f64 {
    let rows: Vec<usize> = (0..targets.len()).collect();
    let parent = sse(targets, &rows);
    let mut best = 0.0f64;
    let mut try_split = |left: Vec<usize>| {
        let right: Vec<usize> = rows.iter().copied().filter(|r| !left.contains(r)).collect();
        if left.len() >= min_leaf && right.len() >= min_leaf {
            best = best.max(parent - sse(targets, &left) - sse(targets, &right));
        }
    };
    for column in features.columns() {
        match column {
            FeatureData::Numeric(values) => {
                let mut distinct: Vec<f64> = values.iter().flatten().copied().collect();
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                for w in distinct.windows(2) {
                    let t = (w[0] + w[1]) / 2.0;
                    try_split(
                        rows.iter()
                            .copied()
                            .filter(|&r| values[r].is_none_or(|v| v <= t))
                            .collect(),
                    );
                }
            }
            FeatureData::Categorical { tokens, codes } => {
                for mask in 1u32..(1 << tokens.len()) {
                    try_split(
                        rows.iter()
                            .copied()
                            .filter(|&r| codes[r].is_none_or(|c| mask & (1 << c) != 0))
                            .collect(),
                    );
                }
            }
        }
    }
    best
}

#[test]
fn root_split_is_the_exhaustive_optimum() {
    for seed in 0..60 {
        let d = random_dataset(seed, 80);
        let targets = attribution::normalized_attributions(&d, "m").unwrap();
        let features = FeatureMatrix::from_dataset(&d, &["g", "x"]).unwrap();
        let params = TreeParams {
            max_depth: 1,
            min_leaf_size: 3,
            ..TreeParams::default()
        };
        let rows: Vec<usize> = (0..d.len()).collect();
        let tree = SegmentTree::grow(&targets, &features, &rows, params).unwrap();
        let oracle = exhaustive_best_gain(&targets, &features, 3);
        match &tree.nodes()[0].split {
            Some(split) => {
                assert!(split.gain >= 0.0);
                assert!((split.gain - oracle).abs() <= 1e-9 * (1.0 + oracle), "seed {seed}");
                let (l, r) = (split.left, split.right);
                let left: Vec<usize> = rows
                    .iter()
                    .copied()
                    .filter(|&i| split.rule.goes_left(&features, i))
                    .collect();
                let right: Vec<usize> = rows
                    .iter()
                    .copied()
                    .filter(|&i| !split.rule.goes_left(&features, i))
                    .collect();
                assert_eq!(tree.nodes()[l].fit.count, left.len());
                assert_eq!(tree.nodes()[r].fit.count, right.len());
                let realised = sse(&targets, &rows) - sse(&targets, &left) - sse(&targets, &right);
                assert!((realised - split.gain).abs() <= 1e-9 * (1.0 + oracle));
            }
            None => assert!(
                oracle <= 1e-12 * (1.0 + sse(&targets, &rows)),
                "seed {seed}: missed gain {oracle}"
            ),
        }
    }
}

#[test]
fn six_example_layout_scaled_to_600_splits_slice_b() {
    let schema = SchemaConfig::new("y", [("m", "s")]).with_feature("Slice", FeatureKind::Categorical);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let slices = ["A", "B", "C"];
    let records: Vec<EvalRecord> = (0..600)
        .map(|i| EvalRecord::new((i % 2) as u8, vec![0.5], vec![slices[(i / 2) % 3].into()]))
        .collect();
    let d = EvalDataset::new(schema, records).unwrap();
    let targets: Vec<f64> = d
        .records()
        .iter()
        .map(|r| {
            let base = match &r.features[0] {
                aucslice_core::dataset::FeatureValue::Categorical(s) if s == "B" => 0.2,
                aucslice_core::dataset::FeatureValue::Categorical(s) if s == "A" => 0.45,
                _ => 0.47,
            };
            base + rng.random_range(-0.02..0.02)
        })
        .collect();
    let features = FeatureMatrix::from_dataset(&d, &["Slice"]).unwrap();
    let oracle = exhaustive_best_gain(&targets, &features, 100);
    let rows: Vec<usize> = (0..600).collect();
    let params = TreeParams {
        max_depth: 1,
        ..TreeParams::default()
    };
    let tree = SegmentTree::grow(&targets, &features, &rows, params).unwrap();
    let split = tree.nodes()[0].split.as_ref().unwrap();
    assert!((split.gain - oracle).abs() < 1e-9);
    let partition = Partition::categorical(&d, "Slice").unwrap();
    let b_side = split.rule.goes_left(&features, 2);
    for r in 0..600 {
        let is_b = partition.assignment[r] == 1;
        assert_eq!(split.rule.goes_left(&features, r) == b_side, is_b);
    }
}

#[test]
fn cross_matrix_matches_pair_enumeration() {
    for seed in 0..100 {
        let d = random_dataset(seed, 150);
        let labels = d.labels();
        let scores = d.scores("m").unwrap();
        let partition = Partition::categorical(&d, "g").unwrap();
        let k = partition.cells();
        let mut counts = vec![0u64; k * k];
        let mut credit = vec![0.0; k * k];
        for i in 0..d.len() {
            for j in 0..d.len() {
                if labels[i] && !labels[j] {
                    let cell = partition.assignment[i] * k + partition.assignment[j];
                    counts[cell] += 1;
                    credit[cell] += attribution::pair_credit(scores[i], scores[j]);
                }
            }
        }
        let mean = pairs::cross_matrix_over(&d, "m", &partition, CrossStatistic::MeanPairAttribution).unwrap();
        let head = pairs::cross_matrix_over(&d, "m", &partition, CrossStatistic::IncorrectPairCount).unwrap();
        for i in 0..k {
            for j in 0..k {
                let c = counts[i * k + j];
                assert_eq!(mean.pair_count(i, j), c);
                if c == 0 {
                    assert_eq!(mean.cell(i, j), None);
                } else {
                    let m = credit[i * k + j] / c as f64;
                    assert!((mean.cell(i, j).unwrap() - m).abs() < 1e-12);
                    assert!((head.cell(i, j).unwrap() - (c as f64 - credit[i * k + j])).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn welch_matches_reference_distributions() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let na = rng.random_range(2..60);
        let nb = rng.random_range(2..60);
        let a: Vec<f64> = (0..na).map(|_| rng.random_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.random_range(0.0..1.3)).collect();
        let (sa, sb) = (SampleSummary::from_values(&a), SampleSummary::from_values(&b));
        let exact = stats::welch_t_test(&sa, &sb, PValueMethod::StudentT);
        let reference = StudentsT::new(0.0, 1.0, exact.degrees_of_freedom).unwrap();
        let expected = 2.0 * reference.cdf(-exact.t_statistic.abs());
        assert!(
            (exact.p_value - expected).abs() < 1e-9,
            "{} vs {expected}",
            exact.p_value
        );

        let approx = stats::welch_t_test(&sa, &sb, PValueMethod::NormalApprox);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let expected = 2.0 * normal.cdf(-approx.t_statistic.abs());
        assert!(
            (approx.p_value - expected).abs() < 1e-10,
            "{} vs {expected}",
            approx.p_value
        );
    }
}

#[test]
fn normal_cdf_is_close_to_student_t_at_large_df() {
    // The worst one-sided CDF gap sits near t = 1.56 and shrinks like 0.158 / df,
    // so it stays under 1e-3 only from df = 160 on.
    for df in [100.0, 160.0, 200.0, 1000.0] {
        for i in 0..=600 {
            let t = i as f64 * 0.01;
            let gap = (stats::student_t_two_sided_p(t, df) - stats::normal_two_sided_p(t)).abs() / 2.0;
            assert!(gap < 0.16 / df, "df {df}, t {t}: {gap}");
            if df >= 160.0 {
                assert!(gap < 1e-3, "df {df}, t {t}: {gap}");
            }
        }
    }
}

#[test]
fn shifted_leaf_is_flagged() {
    // 100 fit values around 0.48, 100 estimation values around 0.30, sd 0.05
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let normal = |rng: &mut ChaCha8Rng, mean: f64| {
        let (u1, u2): (f64, f64) = (rng.random_range(f64::EPSILON..1.0), rng.random_range(0.0..1.0));
        mean + 0.05 * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut targets: Vec<f64> = (0..100).map(|_| normal(&mut rng, 0.48)).collect();
    targets.extend((0..100).map(|_| normal(&mut rng, 0.30)));
    let mut features = FeatureMatrix::new(200);
    features.push_numeric("x", vec![Some(0.0); 200]).unwrap();
    let fit: Vec<usize> = (0..100).collect();
    let est: Vec<usize> = (100..200).collect();
    let tree = SegmentTree::grow(&targets, &features, &fit, TreeParams::default()).unwrap();
    let honest = tree.honest_estimate(&targets, &features, &fit, &est, 0.05);
    let h = honest.nodes()[0].honest.unwrap();
    assert!(h.false_discovery);
    let reference = StudentsT::new(0.0, 1.0, h.test.degrees_of_freedom).unwrap();
    assert!(2.0 * reference.cdf(-h.test.t_statistic.abs()) < 0.05);
}
