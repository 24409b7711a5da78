#![allow(dead_code)]

use aucslice_core::dataset::{EvalDataset, EvalRecord, FeatureKind, FeatureValue, SchemaConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GROUPS: [&str; 4] = ["a", "b", "c", "d"];

pub fn schema() -> SchemaConfig {
    SchemaConfig::new("label", [("m", "score")])
        .with_feature("g", FeatureKind::Categorical)
        .with_feature("x", FeatureKind::Numeric)
}

/// Random dataset of 2..=max_len records with both classes present. Scores lie
/// on a coarse grid so ties are common; features are occasionally missing.
pub fn random_dataset(seed: u64, max_len: usize) -> EvalDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.random_range(2..=max_len);
    let grid = rng.random_range(3..=40);
    let positive_rate = rng.random_range(0.2..0.8);
    let mut records: Vec<EvalRecord> = (0..len)
        .map(|_| {
            let label = rng.random_bool(positive_rate) as u8;
            let score = rng.random_range(0..=grid) as f64 / grid as f64;
            let g = if rng.random_bool(0.05) {
                FeatureValue::Missing
            } else {
                GROUPS[rng.random_range(0..GROUPS.len())].into()
            };
            let x = if rng.random_bool(0.05) {
                FeatureValue::Missing
            } else {
                FeatureValue::Numeric(rng.random_range(0..20) as f64)
            };
            EvalRecord::new(label, vec![score], vec![g, x])
        })
        .collect();
    records[0].label = 1;
    records[len - 1].label = 0;
    EvalDataset::new(schema(), records).unwrap()
}

pub fn brute_force_u(labels: &[bool], scores: &[f64]) -> f64 {
    let mut u = 0.0;
    for i in 0..labels.len() {
        for j in 0..labels.len() {
            if labels[i] && !labels[j] {
                u += if scores[i] > scores[j] {
                    1.0
                } else if scores[i] == scores[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    u
}

pub fn brute_force_auc(labels: &[bool], scores: &[f64]) -> f64 {
    let p = labels.iter().filter(|&&l| l).count() as f64;
    let n = labels.len() as f64 - p;
    brute_force_u(labels, scores) / (p * n)
}

/// Example totals by enumerating every pair: each member gets half the credit.
pub fn brute_force_totals(labels: &[bool], scores: &[f64]) -> Vec<f64> {
    let mut totals = vec![0.0; labels.len()];
    for i in 0..labels.len() {
        for j in 0..labels.len() {
            if labels[i] && !labels[j] {
                let credit = if scores[i] > scores[j] {
                    1.0
                } else if scores[i] == scores[j] {
                    0.5
                } else {
                    0.0
                };
                totals[i] += credit / 2.0;
                totals[j] += credit / 2.0;
            }
        }
    }
    totals
}
