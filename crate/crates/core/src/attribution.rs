//! Credit assignment of AUC to (positive, negative) pairs and to examples.
//!
//! A pair earns credit 1 when the positive outscores the negative, 1/2 on a
//! tie and 0 otherwise; the credits sum to the U statistic `p * n * AUC`.
//! An example receives half the credit of every pair it belongs to. Its
//! normalized attribution divides that total by the size of the opposite
//! class, i.e. averages over the pairs it participates in.

use alloc::vec::Vec;

use crate::dataset::EvalDataset;
use crate::metrics::{self, check_lengths, class_counts};
use crate::rng;
use crate::Result;

/// Credit of one (positive, negative) pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairCredit {
    pub pos_index: usize,
    pub neg_index: usize,
    pub credit: f64,
}

pub fn pair_credit(pos_score: f64, neg_score: f64) -> f64 {
    if pos_score > neg_score {
        1.0
    } else if pos_score == neg_score {
        0.5
    } else {
        0.0
    }
}

/// Class-wise subsampling before pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairSample {
    pub max_pos: usize,
    pub max_neg: usize,
    pub seed: u64,
}

impl PairSample {
    /// Draws `ceil(sqrt(budget))` examples from each class, so the cross
    /// product holds roughly `budget` pairs.
    pub fn from_budget(budget: usize, seed: u64) -> Self {
        let side = libm::ceil(libm::sqrt(budget as f64)) as usize;
        PairSample {
            max_pos: side.max(1),
            max_neg: side.max(1),
            seed,
        }
    }
}

/// Indices of the positive and negative examples, optionally subsampled.
/// Positives are drawn first, then negatives, from one seeded stream.
pub fn sample_classes(labels: &[bool], sample: Option<PairSample>) -> (Vec<usize>, Vec<usize>) {
    let positives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let negatives: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    match sample {
        None => (positives, negatives),
        Some(s) => {
            let mut rng = rng::rng_from_seed(s.seed);
            let pos = rng::sample_without_replacement(&mut rng, &positives, s.max_pos);
            let neg = rng::sample_without_replacement(&mut rng, &negatives, s.max_neg);
            (pos, neg)
        }
    }
}

pub fn pair_attributions_from_scores(
    labels: &[bool],
    scores: &[f64],
    sample: Option<PairSample>,
) -> Result<Vec<PairCredit>> {
    check_lengths(labels.len(), scores.len())?;
    class_counts(labels)?;
    let (positives, negatives) = sample_classes(labels, sample);
    let mut pairs = Vec::with_capacity(positives.len() * negatives.len());
    for &pos_index in &positives {
        for &neg_index in &negatives {
            pairs.push(PairCredit {
                pos_index,
                neg_index,
                credit: pair_credit(scores[pos_index], scores[neg_index]),
            });
        }
    }
    Ok(pairs)
}

/// One credit per (positive, negative) pair, positives in the outer loop.
pub fn pair_attributions(data: &EvalDataset, model: &str, sample: Option<PairSample>) -> Result<Vec<PairCredit>> {
    pair_attributions_from_scores(&data.labels(), &data.scores(model)?, sample)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExampleAttribution {
    pub index: usize,
    pub positive: bool,
    pub score: f64,
    /// Half the summed credit of every pair containing this example.
    pub total: f64,
    /// `total / n` for positives, `total / p` for negatives.
    pub normalized: f64,
}

/// Example attributions in record order, computed by binary search over the
/// sorted scores of the opposite class.
pub fn example_attributions_from_scores(labels: &[bool], scores: &[f64]) -> Result<Vec<ExampleAttribution>> {
    check_lengths(labels.len(), scores.len())?;
    let (p, n) = class_counts(labels)?;
    let mut pos_scores: Vec<f64> = Vec::with_capacity(p);
    let mut neg_scores: Vec<f64> = Vec::with_capacity(n);
    for (&label, &score) in labels.iter().zip(scores) {
        if label {
            pos_scores.push(score);
        } else {
            neg_scores.push(score);
        }
    }
    pos_scores.sort_by(f64::total_cmp);
    neg_scores.sort_by(f64::total_cmp);

    let out = labels
        .iter()
        .zip(scores)
        .enumerate()
        .map(|(index, (&positive, &score))| {
            let opposite = if positive { &neg_scores } else { &pos_scores };
            let below = opposite.partition_point(|&s| s < score);
            let at_or_below = opposite.partition_point(|&s| s <= score);
            let tied = at_or_below - below;
            let wins = if positive { below } else { opposite.len() - at_or_below };
            // Each win grants 1/2; each tie splits its 1/2 credit evenly.
            let total = 0.5 * wins as f64 + 0.25 * tied as f64;
            ExampleAttribution {
                index,
                positive,
                score,
                total,
                normalized: total / opposite.len() as f64,
            }
        })
        .collect();
    Ok(out)
}

pub fn example_attributions(data: &EvalDataset, model: &str) -> Result<Vec<ExampleAttribution>> {
    example_attributions_from_scores(&data.labels(), &data.scores(model)?)
}

pub fn normalized_attributions(data: &EvalDataset, model: &str) -> Result<Vec<f64>> {
    Ok(example_attributions(data, model)?
        .into_iter()
        .map(|a| a.normalized)
        .collect())
}

/// Pearson coefficients of attributions against the per-example losses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationReport {
    pub total_vs_ce_loss: f64,
    pub total_vs_gini: f64,
    pub normalized_vs_ce_loss: f64,
    pub normalized_vs_gini: f64,
}

pub fn attribution_correlation_report(data: &EvalDataset, model: &str) -> Result<CorrelationReport> {
    let attributions = example_attributions(data, model)?;
    let total: Vec<f64> = attributions.iter().map(|a| a.total).collect();
    let normalized: Vec<f64> = attributions.iter().map(|a| a.normalized).collect();
    let ce = metrics::ce_loss(data, model)?.values;
    let gini = metrics::gini_impurity(data, model)?.values;
    Ok(CorrelationReport {
        total_vs_ce_loss: metrics::pearson_correlation(&total, &ce)?,
        total_vs_gini: metrics::pearson_correlation(&total, &gini)?,
        normalized_vs_ce_loss: metrics::pearson_correlation(&normalized, &ce)?,
        normalized_vs_gini: metrics::pearson_correlation(&normalized, &gini)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::fixtures::six_examples;
    use crate::Error;
    use alloc::vec;

    #[test]
    fn six_example_pairs() {
        let pairs = pair_attributions(&six_examples(), "model", None).unwrap();
        assert_eq!(pairs.len(), 9);
        let misordered: Vec<_> = pairs.iter().filter(|p| p.credit == 0.0).collect();
        assert_eq!(misordered.len(), 1);
        // records 4 and 3 in 1-based numbering
        assert_eq!((misordered[0].pos_index, misordered[0].neg_index), (3, 2));
        assert_eq!(pairs.iter().map(|p| p.credit).sum::<f64>(), 8.0);
    }

    #[test]
    fn tie_pair() {
        let pairs = pair_attributions_from_scores(&[true, false], &[0.5, 0.5], None).unwrap();
        assert_eq!(
            pairs,
            vec![PairCredit {
                pos_index: 0,
                neg_index: 1,
                credit: 0.5
            }]
        );
        let ex = example_attributions_from_scores(&[true, false], &[0.5, 0.5]).unwrap();
        assert_eq!(ex[0].total, 0.25);
        assert_eq!(ex[1].total, 0.25);
    }

    #[test]
    fn six_example_attributions() {
        let ex = example_attributions(&six_examples(), "model").unwrap();
        assert_eq!(ex[1].total, 1.5);
        assert_eq!(ex[1].normalized, 0.5);
        assert_eq!(ex[3].total, 1.0);
        assert!((ex[3].normalized - 1.0 / 3.0).abs() < 1e-15);
        let sum: f64 = ex.iter().map(|a| a.total).sum();
        assert!((sum / 9.0 - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_pairs() {
        let labels: Vec<bool> = (0..40).map(|i| i % 3 == 0).collect();
        let scores: Vec<f64> = (0..40).map(|i| (i * 7 % 11) as f64 / 10.0).collect();
        let s = PairSample {
            max_pos: 4,
            max_neg: 5,
            seed: 3,
        };
        let pairs = pair_attributions_from_scores(&labels, &scores, Some(s)).unwrap();
        assert_eq!(pairs.len(), 20);
        assert_eq!(pairs, pair_attributions_from_scores(&labels, &scores, Some(s)).unwrap());
        let one = PairSample {
            max_pos: 1,
            max_neg: 1,
            seed: 0,
        };
        assert_eq!(
            pair_attributions_from_scores(&labels, &scores, Some(one))
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn budget_sampling() {
        let s = PairSample::from_budget(10_000, 1);
        assert_eq!((s.max_pos, s.max_neg), (100, 100));
        assert_eq!(PairSample::from_budget(10, 1).max_pos, 4);
    }

    #[test]
    fn correlation_report() {
        let report = attribution_correlation_report(&six_examples(), "model").unwrap();
        for v in [
            report.total_vs_ce_loss,
            report.total_vs_gini,
            report.normalized_vs_ce_loss,
            report.normalized_vs_gini,
        ] {
            assert!(v.is_finite());
        }
        let labels = [true, false, true, false];
        let flat = example_attributions_from_scores(&labels, &[0.3; 4]).unwrap();
        let normalized: Vec<f64> = flat.iter().map(|a| a.normalized).collect();
        assert_eq!(
            metrics::pearson_correlation(&normalized, &[0.1, 0.2, 0.3, 0.4]),
            Err(Error::ZeroVariance)
        );
    }
}
