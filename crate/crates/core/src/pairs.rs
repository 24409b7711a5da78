//! Pair-level analysis: pair datasets, cross matrices over a partition and
//! tree segmentation of pair credits.
//!
//! A cross `A_i x A_j` holds the pairs whose positive lies in cell `i` and
//! whose negative lies in cell `j`. Matrices are indexed `[positive][negative]`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::attribution::{pair_credit, sample_classes, PairCredit, PairSample};
use crate::dataset::{EvalDataset, Partition};
use crate::metrics::class_counts;
use crate::rng;
use crate::segmentation::{segment_values, FeatureMatrix, SegmentTarget, Segmentation, TreeParams};
use crate::{Error, Result};

pub const POSITIVE_SUFFIX: &str = "_pos";
pub const NEGATIVE_SUFFIX: &str = "_neg";

/// Pairs with their credits and the concatenated features of both members.
#[derive(Clone, Debug, PartialEq)]
pub struct PairDataset {
    pub pairs: Vec<PairCredit>,
    /// Positive-member columns (suffixed `_pos`) followed by negative-member
    /// columns (suffixed `_neg`); row `k` describes `pairs[k]`.
    pub features: FeatureMatrix,
}

impl PairDataset {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn credits(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.credit).collect()
    }
}

/// Cartesian product of the (optionally sampled) positives and negatives,
/// carrying the features in `dims` of both members.
pub fn build_pair_dataset<S: AsRef<str>>(
    data: &EvalDataset,
    model: &str,
    dims: &[S],
    sample: Option<PairSample>,
) -> Result<PairDataset> {
    let labels = data.labels();
    let scores = data.scores(model)?;
    class_counts(&labels)?;
    let example_features = FeatureMatrix::from_dataset(data, dims)?;
    let (positives, negatives) = sample_classes(&labels, sample);

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
    let pos_rows: Vec<usize> = pairs.iter().map(|p| p.pos_index).collect();
    let neg_rows: Vec<usize> = pairs.iter().map(|p| p.neg_index).collect();
    let mut features = example_features.gather(&pos_rows, POSITIVE_SUFFIX);
    features.append(example_features.gather(&neg_rows, NEGATIVE_SUFFIX))?;
    Ok(PairDataset { pairs, features })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossStatistic {
    /// Fraction of the cross's pairs ordered correctly (ties count 1/2).
    MeanPairAttribution,
    /// Number of the cross's pairs ordered incorrectly (ties count 1/2).
    IncorrectPairCount,
}

/// Aggregate pair statistic for every cross of a partition.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossMatrix {
    pub feature: String,
    pub categories: Vec<String>,
    pub statistic: CrossStatistic,
    pair_counts: Vec<u64>,
    credit_sums: Vec<f64>,
}

impl CrossMatrix {
    pub fn size(&self) -> usize {
        self.categories.len()
    }

    fn at(&self, pos_cell: usize, neg_cell: usize) -> usize {
        pos_cell * self.categories.len() + neg_cell
    }

    pub fn pair_count(&self, pos_cell: usize, neg_cell: usize) -> u64 {
        self.pair_counts[self.at(pos_cell, neg_cell)]
    }

    /// Summed credit of the cross's pairs.
    pub fn credit_sum(&self, pos_cell: usize, neg_cell: usize) -> f64 {
        self.credit_sums[self.at(pos_cell, neg_cell)]
    }

    /// The matrix statistic; `None` for a cross without pairs.
    pub fn cell(&self, pos_cell: usize, neg_cell: usize) -> Option<f64> {
        let count = self.pair_count(pos_cell, neg_cell);
        let credit = self.credit_sum(pos_cell, neg_cell);
        match self.statistic {
            _ if count == 0 => None,
            CrossStatistic::MeanPairAttribution => Some(credit / count as f64),
            CrossStatistic::IncorrectPairCount => Some(count as f64 - credit),
        }
    }

    pub fn total_pairs(&self) -> u64 {
        self.pair_counts.iter().sum()
    }

    /// Sum of the statistic over all non-empty cells.
    pub fn cell_total(&self) -> f64 {
        let k = self.size();
        (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter_map(|(i, j)| self.cell(i, j))
            .sum()
    }
}

/// Partial cross sums over a subset of the positives. Accumulators over
/// disjoint positive sets can be merged in any order with identical results,
/// since every sum is a count or a multiple of one half.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossAccumulator {
    cells: usize,
    pair_counts: Vec<u64>,
    credit_sums: Vec<f64>,
}

/// Negative scores grouped by partition cell and sorted, shared by every
/// accumulator of one matrix computation.
#[derive(Clone, Debug)]
pub struct NegativeIndex {
    by_cell: Vec<Vec<f64>>,
}

impl NegativeIndex {
    pub fn new(labels: &[bool], scores: &[f64], partition: &Partition) -> Self {
        let mut by_cell = vec![Vec::new(); partition.cells()];
        for (i, (&label, &score)) in labels.iter().zip(scores).enumerate() {
            if !label {
                by_cell[partition.assignment[i]].push(score);
            }
        }
        for cell in &mut by_cell {
            cell.sort_by(f64::total_cmp);
        }
        NegativeIndex { by_cell }
    }
}

impl CrossAccumulator {
    pub fn new(cells: usize) -> Self {
        CrossAccumulator {
            cells,
            pair_counts: vec![0; cells * cells],
            credit_sums: vec![0.0; cells * cells],
        }
    }

    /// Adds all pairs of the positive records `positives` with every negative.
    pub fn add_positives(
        &mut self,
        positives: &[usize],
        scores: &[f64],
        partition: &Partition,
        negatives: &NegativeIndex,
    ) {
        for &p in positives {
            let s = scores[p];
            let row = partition.assignment[p] * self.cells;
            for (j, neg) in negatives.by_cell.iter().enumerate() {
                let below = neg.partition_point(|&x| x < s);
                let tied = neg.partition_point(|&x| x <= s) - below;
                self.pair_counts[row + j] += neg.len() as u64;
                self.credit_sums[row + j] += below as f64 + 0.5 * tied as f64;
            }
        }
    }

    pub fn merge(&mut self, other: &CrossAccumulator) {
        for (a, b) in self.pair_counts.iter_mut().zip(&other.pair_counts) {
            *a += b;
        }
        for (a, b) in self.credit_sums.iter_mut().zip(&other.credit_sums) {
            *a += b;
        }
    }

    pub fn finish(self, partition: &Partition, statistic: CrossStatistic) -> CrossMatrix {
        CrossMatrix {
            feature: partition.feature.clone(),
            categories: partition.labels.clone(),
            statistic,
            pair_counts: self.pair_counts,
            credit_sums: self.credit_sums,
        }
    }
}

/// Cross matrix of `model`'s pair credits over `partition`.
pub fn cross_matrix_over(
    data: &EvalDataset,
    model: &str,
    partition: &Partition,
    statistic: CrossStatistic,
) -> Result<CrossMatrix> {
    let labels = data.labels();
    let scores = data.scores(model)?;
    class_counts(&labels)?;
    if partition.assignment.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: partition.assignment.len(),
            right: labels.len(),
        });
    }
    let negatives = NegativeIndex::new(&labels, &scores, partition);
    let positives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut acc = CrossAccumulator::new(partition.cells());
    acc.add_positives(&positives, &scores, partition, &negatives);
    Ok(acc.finish(partition, statistic))
}

/// Cross matrix over the cells of a categorical feature.
pub fn cross_matrix(data: &EvalDataset, model: &str, feature: &str, statistic: CrossStatistic) -> Result<CrossMatrix> {
    data.schema().model_index(model)?;
    let partition = Partition::categorical(data, feature)?;
    cross_matrix_over(data, model, &partition, statistic)
}

/// Pair-tree segmentation with its sampled pair dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSegmentation {
    pub pairs: PairDataset,
    pub segmentation: Segmentation,
}

/// One leaf of a pair tree, with its conditions split by pair member.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSegmentRow {
    pub node: usize,
    pub negative_slice: String,
    pub positive_slice: String,
    pub est_count: usize,
    pub honest_mean: Option<f64>,
    pub p_value: f64,
    pub false_discovery: bool,
}

impl PairSegmentation {
    /// Leaves from left to right, each as negative slice, positive slice and
    /// honest mean pair credit.
    pub fn rows(&self) -> Vec<PairSegmentRow> {
        let tree = &self.segmentation.tree;
        let report = tree.report();
        tree.leaves()
            .into_iter()
            .map(|leaf| {
                let row = &report[leaf];
                let (mut neg, mut pos) = (Vec::new(), Vec::new());
                let mut id = leaf;
                while let Some((parent, is_left)) = tree.nodes()[id].parent {
                    let rule = &tree.nodes()[parent].split.as_ref().expect("internal node").rule;
                    let text = rule.describe(is_left);
                    if rule.feature.ends_with(NEGATIVE_SUFFIX) {
                        neg.push(text);
                    } else {
                        pos.push(text);
                    }
                    id = parent;
                }
                neg.reverse();
                pos.reverse();
                let join = |parts: Vec<String>| {
                    if parts.is_empty() {
                        "All".to_string()
                    } else {
                        parts.join(" and ")
                    }
                };
                PairSegmentRow {
                    node: leaf,
                    negative_slice: join(neg),
                    positive_slice: join(pos),
                    est_count: row.est_count,
                    honest_mean: row.honest_mean,
                    p_value: row.p_value,
                    false_discovery: row.false_discovery,
                }
            })
            .collect()
    }
}

/// Samples about `pair_budget` pairs, then segments their credits along the
/// `_pos` and `_neg` versions of `dims`.
pub fn segment_pairs<S: AsRef<str>>(
    data: &EvalDataset,
    model: &str,
    dims: &[S],
    params: TreeParams,
    pair_budget: usize,
    seed: u64,
) -> Result<PairSegmentation> {
    if pair_budget == 0 {
        return Err(Error::InvalidParameter("pair budget must be positive".into()));
    }
    let sample = PairSample::from_budget(pair_budget, rng::derive_seed(seed, 1));
    let pairs = build_pair_dataset(data, model, dims, Some(sample))?;
    let mut segmentation = segment_values(&pairs.credits(), &pairs.features, params, rng::derive_seed(seed, 2))?;
    segmentation.tree = segmentation.tree.with_target(SegmentTarget::PairCredit {
        model: model.to_string(),
    });
    Ok(PairSegmentation { pairs, segmentation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::fixtures::six_examples;
    use crate::segmentation::FeatureData;

    #[test]
    fn six_example_pair_dataset() {
        let pd = build_pair_dataset(&six_examples(), "model", &["Slice"], None).unwrap();
        assert_eq!(pd.len(), 9);
        assert_eq!(pd.features.names(), &["Slice_pos", "Slice_neg"]);
        assert_eq!(pd.credits().iter().sum::<f64>(), 8.0);
        // Pair (record 4, record 3) is the misordered one, both in slice B.
        let k = pd.pairs.iter().position(|p| p.credit == 0.0).unwrap();
        for column in pd.features.columns() {
            let FeatureData::Categorical { tokens, codes } = column else {
                panic!()
            };
            assert_eq!(tokens[codes[k].unwrap() as usize], "B");
        }
    }

    #[test]
    fn minimal_sample() {
        let s = PairSample {
            max_pos: 1,
            max_neg: 1,
            seed: 5,
        };
        let pd = build_pair_dataset(&six_examples(), "model", &["Slice"], Some(s)).unwrap();
        assert_eq!(pd.len(), 1);
    }

    #[test]
    fn six_example_mean_matrix() {
        let m = cross_matrix(&six_examples(), "model", "Slice", CrossStatistic::MeanPairAttribution).unwrap();
        assert_eq!(m.categories, vec!["A", "B", "C"]);
        assert_eq!(
            (m.cell(0, 0), m.cell(1, 1), m.cell(2, 2)),
            (Some(1.0), Some(0.0), Some(1.0))
        );
        assert_eq!(m.cell(1, 0), Some(1.0));
        assert_eq!(m.cell(0, 1), Some(1.0));
        assert_eq!(m.total_pairs(), 9);
    }

    #[test]
    fn six_example_headroom_matrix() {
        let m = cross_matrix(&six_examples(), "model", "Slice", CrossStatistic::IncorrectPairCount).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if (i, j) == (1, 1) { 1.0 } else { 0.0 };
                assert_eq!(m.cell(i, j), Some(expected));
            }
        }
        assert!((m.cell_total() / 9.0 - (1.0 - 8.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn cross_errors() {
        let d = six_examples();
        assert!(matches!(
            cross_matrix(&d, "model", "Nope", CrossStatistic::MeanPairAttribution),
            Err(Error::UnknownFeature(_))
        ));
        let only_neg = d.subset(&[0, 2]);
        assert!(matches!(
            cross_matrix(&only_neg, "model", "Slice", CrossStatistic::MeanPairAttribution),
            Err(Error::DegenerateLabels { .. })
        ));
    }

    #[test]
    fn merge_matches_single_pass() {
        let d = six_examples();
        let partition = Partition::categorical(&d, "Slice").unwrap();
        let labels = d.labels();
        let scores = d.scores("model").unwrap();
        let neg = NegativeIndex::new(&labels, &scores, &partition);
        let mut a = CrossAccumulator::new(3);
        a.add_positives(&[1], &scores, &partition, &neg);
        let mut b = CrossAccumulator::new(3);
        b.add_positives(&[3, 5], &scores, &partition, &neg);
        b.merge(&a);
        let whole = cross_matrix_over(&d, "model", &partition, CrossStatistic::MeanPairAttribution).unwrap();
        assert_eq!(b.finish(&partition, CrossStatistic::MeanPairAttribution), whole);
    }
}
