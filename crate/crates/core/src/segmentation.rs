//! Regression-tree segmentation of per-record targets with honest estimates.
//!
//! The tree is grown on one part of the data (the fit half) by greedy
//! variance reduction. Leaf means are then re-estimated on the disjoint
//! estimation half, and a Welch t-test between the two halves' values in each
//! node flags segments whose estimate does not replicate.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::attribution;
use crate::dataset::{EvalDataset, FeatureKind, FeatureValue};
use crate::rng;
use crate::stats::{welch_t_test, PValueMethod, SampleSummary, WelchTest};
use crate::{Error, Result};

/// Categorical features with more distinct values than this (within a node)
/// are split one token against the rest instead of by subset enumeration.
pub const MAX_SUBSET_CARDINALITY: usize = 8;

/// One column of a [`FeatureMatrix`].
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureData {
    Numeric(Vec<Option<f64>>),
    Categorical {
        /// Sorted vocabulary.
        tokens: Vec<String>,
        codes: Vec<Option<u32>>,
    },
}

impl FeatureData {
    fn gather(&self, rows: &[usize]) -> FeatureData {
        match self {
            FeatureData::Numeric(v) => FeatureData::Numeric(rows.iter().map(|&r| v[r]).collect()),
            FeatureData::Categorical { tokens, codes } => FeatureData::Categorical {
                tokens: tokens.clone(),
                codes: rows.iter().map(|&r| codes[r]).collect(),
            },
        }
    }
}

/// Column-major slicing features, one row per target value.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    names: Vec<String>,
    columns: Vec<FeatureData>,
}

impl FeatureMatrix {
    pub fn new(rows: usize) -> Self {
        FeatureMatrix {
            rows,
            names: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[FeatureData] {
        &self.columns
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.rows {
            return Err(Error::LengthMismatch {
                left: self.rows,
                right: len,
            });
        }
        Ok(())
    }

    pub fn push_numeric(&mut self, name: &str, values: Vec<Option<f64>>) -> Result<()> {
        self.check_len(values.len())?;
        if values.iter().flatten().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter(format!("feature `{name}` contains NaN")));
        }
        self.names.push(name.to_string());
        self.columns.push(FeatureData::Numeric(values));
        Ok(())
    }

    pub fn push_categorical<S: AsRef<str>>(&mut self, name: &str, values: &[Option<S>]) -> Result<()> {
        self.check_len(values.len())?;
        let vocab: BTreeSet<&str> = values.iter().flatten().map(AsRef::as_ref).collect();
        let tokens: Vec<String> = vocab.iter().map(|t| t.to_string()).collect();
        let codes = values
            .iter()
            .map(|v| {
                v.as_ref()
                    .map(|t| tokens.binary_search_by(|x| x.as_str().cmp(t.as_ref())).unwrap() as u32)
            })
            .collect();
        self.names.push(name.to_string());
        self.columns.push(FeatureData::Categorical { tokens, codes });
        Ok(())
    }

    /// Matrix over the dataset's features named in `dims`, in that order.
    pub fn from_dataset<S: AsRef<str>>(data: &EvalDataset, dims: &[S]) -> Result<Self> {
        let mut matrix = FeatureMatrix::new(data.len());
        for dim in dims {
            let name = dim.as_ref();
            let f = data.schema().feature_index(name)?;
            match data.schema().feature_columns[f].kind {
                FeatureKind::Numeric => {
                    let values = data
                        .records()
                        .iter()
                        .map(|r| match r.features[f] {
                            FeatureValue::Numeric(v) => Some(v),
                            _ => None,
                        })
                        .collect();
                    matrix.push_numeric(name, values)?;
                }
                FeatureKind::Categorical => {
                    let values: Vec<Option<&str>> = data
                        .records()
                        .iter()
                        .map(|r| match &r.features[f] {
                            FeatureValue::Categorical(t) => Some(t.as_str()),
                            _ => None,
                        })
                        .collect();
                    matrix.push_categorical(name, &values)?;
                }
            }
        }
        Ok(matrix)
    }

    /// New matrix whose row `k` is row `rows[k]` of this one, with `suffix`
    /// appended to every column name.
    pub fn gather(&self, rows: &[usize], suffix: &str) -> FeatureMatrix {
        FeatureMatrix {
            rows: rows.len(),
            names: self.names.iter().map(|n| format!("{n}{suffix}")).collect(),
            columns: self.columns.iter().map(|c| c.gather(rows)).collect(),
        }
    }

    /// Appends the columns of `other`, which must have the same row count.
    pub fn append(&mut self, other: FeatureMatrix) -> Result<()> {
        self.check_len(other.rows)?;
        self.names.extend(other.names);
        self.columns.extend(other.columns);
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SplitCondition {
    /// Numeric value `<= threshold` goes left.
    AtMost(f64),
    /// Categorical value in the (sorted) token set goes left.
    OneOf(Vec<String>),
}

/// Routing rule of an internal node. Missing values always go left.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitRule {
    pub feature: String,
    pub feature_index: usize,
    pub condition: SplitCondition,
    /// Whether fit-half records with a missing value reached this node.
    pub missing_seen: bool,
}

impl SplitRule {
    pub fn goes_left(&self, features: &FeatureMatrix, row: usize) -> bool {
        match (&features.columns[self.feature_index], &self.condition) {
            (FeatureData::Numeric(values), SplitCondition::AtMost(t)) => match values[row] {
                Some(v) => v <= *t,
                None => true,
            },
            (FeatureData::Categorical { tokens, codes }, SplitCondition::OneOf(set)) => match codes[row] {
                Some(c) => set.binary_search(&tokens[c as usize]).is_ok(),
                None => true,
            },
            _ => true,
        }
    }

    /// Human-readable condition for the left (`true`) or right branch.
    pub fn describe(&self, left: bool) -> String {
        let name = &self.feature;
        let text = match (&self.condition, left) {
            (SplitCondition::AtMost(t), true) => format!("{name}<={t}"),
            (SplitCondition::AtMost(t), false) => format!("{name}>{t}"),
            (SplitCondition::OneOf(set), left) if set.len() == 1 => {
                format!("{name} {} {}", if left { "=" } else { "!=" }, set[0])
            }
            (SplitCondition::OneOf(set), left) => {
                format!("{name} {} {{{}}}", if left { "in" } else { "not in" }, set.join(", "))
            }
        };
        if left && self.missing_seen {
            format!("{text} (or missing)")
        } else {
            text
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf_size: usize,
    pub significance_level: f64,
    /// Share of the records used to grow the tree; the rest estimate it.
    pub fit_fraction: f64,
    pub p_value_method: PValueMethod,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 3,
            min_leaf_size: 100,
            significance_level: 0.05,
            fit_fraction: 0.5,
            p_value_method: PValueMethod::NormalApprox,
        }
    }
}

impl TreeParams {
    /// Defaults for trees over example pairs (leaves of at least 1000 pairs).
    pub fn for_pairs() -> Self {
        TreeParams {
            min_leaf_size: 1000,
            ..TreeParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_leaf_size == 0 {
            return Err(Error::InvalidParameter("min_leaf_size must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.significance_level) {
            return Err(Error::InvalidParameter("significance level must lie in [0, 1]".into()));
        }
        crate::dataset::check_fraction(self.fit_fraction)
    }
}

/// What a tree's targets measure.
#[derive(Clone, Debug, PartialEq)]
pub enum SegmentTarget {
    NormalizedAttribution { model: String },
    DeltaAttribution { model_a: String, model_b: String },
    PairCredit { model: String },
    Values,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeSplit {
    pub rule: SplitRule,
    pub left: usize,
    pub right: usize,
    /// Reduction in the within-node sum of squared deviations.
    pub gain: f64,
}

/// Fit-half versus estimation-half comparison for one node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HonestEstimate {
    pub fit: SampleSummary,
    pub estimation: SampleSummary,
    pub test: WelchTest,
    pub false_discovery: bool,
}

impl HonestEstimate {
    /// Mean of the estimation-half targets, if any reached the node.
    pub fn honest_mean(&self) -> Option<f64> {
        (self.estimation.count > 0).then_some(self.estimation.mean)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub depth: usize,
    /// Parent node and whether this node is its left child.
    pub parent: Option<(usize, bool)>,
    /// Targets of the fit-half records that reached the node while growing.
    pub fit: SampleSummary,
    pub split: Option<NodeSplit>,
    pub honest: Option<HonestEstimate>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }
}

/// A fitted segmentation tree. Nodes are stored in breadth-first order with
/// the root at index 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentTree {
    nodes: Vec<TreeNode>,
    feature_names: Vec<String>,
    params: TreeParams,
    target: SegmentTarget,
}

struct Candidate {
    gain: f64,
    feature: usize,
    condition: SplitCondition,
}

/// Between-group sum of squares: the drop in within-node squared error.
fn split_gain(n_left: f64, sum_left: f64, n: f64, sum: f64) -> f64 {
    let n_right = n - n_left;
    let diff = sum_left / n_left - (sum - sum_left) / n_right;
    n_left * n_right / n * diff * diff
}

fn consider(best: &mut Option<Candidate>, gain: f64, feature: usize, condition: impl FnOnce() -> SplitCondition) {
    if best.as_ref().is_none_or(|b| gain > b.gain) {
        *best = Some(Candidate {
            gain,
            feature,
            condition: condition(),
        });
    }
}

fn best_split(targets: &[f64], features: &FeatureMatrix, rows: &[usize], min_leaf: usize) -> Option<Candidate> {
    let first = targets[rows[0]];
    if rows.iter().all(|&r| targets[r] == first) {
        return None;
    }
    let n = rows.len() as f64;
    let total: f64 = rows.iter().map(|&r| targets[r]).sum();
    let sse = SampleSummary::from_values(rows.iter().map(|&r| &targets[r])).variance() * (n - 1.0);
    let floor = sse * 1e-12;
    let mut best: Option<Candidate> = None;

    for (f, column) in features.columns.iter().enumerate() {
        match column {
            FeatureData::Numeric(values) => {
                let (mut missing_n, mut missing_sum) = (0usize, 0.0);
                let mut present: Vec<(f64, f64)> = Vec::with_capacity(rows.len());
                for &r in rows {
                    match values[r] {
                        Some(v) => present.push((v, targets[r])),
                        None => {
                            missing_n += 1;
                            missing_sum += targets[r];
                        }
                    }
                }
                present.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut acc = 0.0;
                for k in 0..present.len().saturating_sub(1) {
                    acc += present[k].1;
                    let (lo, hi) = (present[k].0, present[k + 1].0);
                    if lo == hi {
                        continue;
                    }
                    let n_left = missing_n + k + 1;
                    if n_left < min_leaf || rows.len() - n_left < min_leaf {
                        continue;
                    }
                    let gain = split_gain(n_left as f64, missing_sum + acc, n, total);
                    if gain > floor {
                        consider(&mut best, gain, f, || {
                            let mid = lo + (hi - lo) / 2.0;
                            SplitCondition::AtMost(if mid < hi { mid } else { lo })
                        });
                    }
                }
            }
            FeatureData::Categorical { tokens, codes } => {
                let mut counts = vec![0usize; tokens.len()];
                let mut sums = vec![0.0; tokens.len()];
                let (mut missing_n, mut missing_sum) = (0usize, 0.0);
                for &r in rows {
                    match codes[r] {
                        Some(c) => {
                            counts[c as usize] += 1;
                            sums[c as usize] += targets[r];
                        }
                        None => {
                            missing_n += 1;
                            missing_sum += targets[r];
                        }
                    }
                }
                let present: Vec<usize> = (0..tokens.len()).filter(|&c| counts[c] > 0).collect();
                let mut evaluate = |members: &[usize]| {
                    let n_left = missing_n + members.iter().map(|&c| counts[c]).sum::<usize>();
                    if n_left < min_leaf || rows.len() - n_left < min_leaf {
                        return;
                    }
                    let sum_left = missing_sum + members.iter().map(|&c| sums[c]).sum::<f64>();
                    let gain = split_gain(n_left as f64, sum_left, n, total);
                    if gain > floor {
                        consider(&mut best, gain, f, || {
                            SplitCondition::OneOf(members.iter().map(|&c| tokens[c].clone()).collect())
                        });
                    }
                };
                if present.len() <= MAX_SUBSET_CARDINALITY {
                    for mask in 1u32..(1u32 << present.len()) {
                        let members: Vec<usize> = present
                            .iter()
                            .enumerate()
                            .filter(|(bit, _)| mask & (1 << bit) != 0)
                            .map(|(_, &c)| c)
                            .collect();
                        evaluate(&members);
                    }
                } else {
                    for &c in &present {
                        evaluate(&[c]);
                    }
                }
            }
        }
    }
    best
}

impl SegmentTree {
    /// Grows a tree on `rows` by greedy variance reduction. A node is split
    /// only below `max_depth`, when both children keep at least
    /// `min_leaf_size` rows and the split strictly reduces squared error.
    /// Ties between equally good splits go to the lowest feature index, then
    /// the lowest threshold (or first token subset).
    pub fn grow(targets: &[f64], features: &FeatureMatrix, rows: &[usize], params: TreeParams) -> Result<Self> {
        params.validate()?;
        features.check_len(targets.len())?;
        if rows.is_empty() {
            return Err(Error::TooFewRecords {
                records: 0,
                required: 1,
            });
        }
        let min_leaf = params.min_leaf_size;
        let mut nodes = vec![TreeNode {
            depth: 0,
            parent: None,
            fit: SampleSummary::from_values(rows.iter().map(|&r| &targets[r])),
            split: None,
            honest: None,
        }];
        let mut queue = VecDeque::from([(0usize, rows.to_vec())]);
        while let Some((id, node_rows)) = queue.pop_front() {
            let depth = nodes[id].depth;
            if depth >= params.max_depth || node_rows.len() < 2 * min_leaf {
                continue;
            }
            let Some(best) = best_split(targets, features, &node_rows, min_leaf) else {
                continue;
            };
            let column = &features.columns[best.feature];
            let missing_seen = node_rows.iter().any(|&r| match column {
                FeatureData::Numeric(v) => v[r].is_none(),
                FeatureData::Categorical { codes, .. } => codes[r].is_none(),
            });
            let rule = SplitRule {
                feature: features.names[best.feature].clone(),
                feature_index: best.feature,
                condition: best.condition,
                missing_seen,
            };
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
                node_rows.iter().partition(|&&r| rule.goes_left(features, r));
            let (left, right) = (nodes.len(), nodes.len() + 1);
            for (child_rows, is_left) in [(&left_rows, true), (&right_rows, false)] {
                nodes.push(TreeNode {
                    depth: depth + 1,
                    parent: Some((id, is_left)),
                    fit: SampleSummary::from_values(child_rows.iter().map(|&r| &targets[r])),
                    split: None,
                    honest: None,
                });
            }
            nodes[id].split = Some(NodeSplit {
                rule,
                left,
                right,
                gain: best.gain,
            });
            queue.push_back((left, left_rows));
            queue.push_back((right, right_rows));
        }
        Ok(SegmentTree {
            nodes,
            feature_names: features.names.clone(),
            params,
            target: SegmentTarget::Values,
        })
    }

    pub fn with_target(mut self, target: SegmentTarget) -> Self {
        self.target = target;
        self
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn target(&self) -> &SegmentTarget {
        &self.target
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Leaf indices from left to right.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            match &self.nodes[id].split {
                Some(s) => {
                    stack.push(s.right);
                    stack.push(s.left);
                }
                None => out.push(id),
            }
        }
        out
    }

    /// Leaf reached by `row`.
    pub fn route(&self, features: &FeatureMatrix, row: usize) -> usize {
        let mut id = 0;
        while let Some(s) = &self.nodes[id].split {
            id = if s.rule.goes_left(features, row) {
                s.left
            } else {
                s.right
            };
        }
        id
    }

    fn route_path(&self, features: &FeatureMatrix, row: usize, mut visit: impl FnMut(usize)) {
        let mut id = 0;
        loop {
            visit(id);
            match &self.nodes[id].split {
                Some(s) => {
                    id = if s.rule.goes_left(features, row) {
                        s.left
                    } else {
                        s.right
                    }
                }
                None => break,
            }
        }
    }

    /// Branch conditions from the root down to `node`.
    pub fn conditions(&self, node: usize) -> Vec<String> {
        let mut out = Vec::new();
        let mut id = node;
        while let Some((parent, is_left)) = self.nodes[id].parent {
            let rule = &self.nodes[parent].split.as_ref().expect("parent has a split").rule;
            out.push(rule.describe(is_left));
            id = parent;
        }
        out.reverse();
        out
    }

    /// Re-estimates every node on `estimation_rows`, keeping the splits fixed.
    ///
    /// Fit statistics are recomputed from `targets` at `fit_rows`. Each node
    /// gets a Welch test of fit-half against estimation-half targets and is
    /// flagged a false discovery when its p-value falls below
    /// `significance_level`. Nodes that no estimation row reaches get
    /// `p = 0` and an undefined (`NaN`) t statistic.
    pub fn honest_estimate(
        &self,
        targets: &[f64],
        features: &FeatureMatrix,
        fit_rows: &[usize],
        estimation_rows: &[usize],
        significance_level: f64,
    ) -> SegmentTree {
        let mut fit = vec![SampleSummary::default(); self.nodes.len()];
        let mut estimation = vec![SampleSummary::default(); self.nodes.len()];
        for &r in fit_rows {
            self.route_path(features, r, |id| fit[id].push(targets[r]));
        }
        for &r in estimation_rows {
            self.route_path(features, r, |id| estimation[id].push(targets[r]));
        }
        let mut tree = self.clone();
        tree.params.significance_level = significance_level;
        for (id, node) in tree.nodes.iter_mut().enumerate() {
            let test = if estimation[id].count == 0 {
                WelchTest {
                    t_statistic: f64::NAN,
                    degrees_of_freedom: f64::NAN,
                    p_value: 0.0,
                }
            } else {
                welch_t_test(&fit[id], &estimation[id], self.params.p_value_method)
            };
            node.honest = Some(HonestEstimate {
                fit: fit[id],
                estimation: estimation[id],
                test,
                false_discovery: test.p_value < significance_level,
            });
        }
        tree
    }

    /// One row per node, breadth first, root first.
    pub fn report(&self) -> Vec<SegmentRow> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(id, node)| {
                let conditions = self.conditions(id);
                let description = if conditions.is_empty() {
                    String::from("All data")
                } else {
                    conditions.join(", ")
                };
                let (fit, est, test, flag) = match &node.honest {
                    Some(h) => (h.fit, h.estimation, Some(h.test), h.false_discovery),
                    None => (node.fit, SampleSummary::default(), None, false),
                };
                SegmentRow {
                    node: id,
                    depth: node.depth,
                    is_leaf: node.is_leaf(),
                    conditions,
                    description,
                    fit_count: fit.count,
                    fit_mean: fit.mean,
                    est_count: est.count,
                    honest_mean: (est.count > 0).then_some(est.mean),
                    t_statistic: test.map_or(f64::NAN, |t| t.t_statistic),
                    p_value: test.map_or(f64::NAN, |t| t.p_value),
                    false_discovery: flag,
                }
            })
            .collect()
    }
}

/// One node of a segmentation report.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentRow {
    pub node: usize,
    pub depth: usize,
    pub is_leaf: bool,
    pub conditions: Vec<String>,
    pub description: String,
    pub fit_count: usize,
    pub fit_mean: f64,
    pub est_count: usize,
    pub honest_mean: Option<f64>,
    pub t_statistic: f64,
    pub p_value: f64,
    pub false_discovery: bool,
}

/// A tree together with the fit/estimation split it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct Segmentation {
    pub tree: SegmentTree,
    pub fit_rows: Vec<usize>,
    pub estimation_rows: Vec<usize>,
}

impl Segmentation {
    pub fn report(&self) -> Vec<SegmentRow> {
        self.tree.report()
    }
}

/// Splits the rows with `params.fit_fraction` (seeded) and grows a tree on
/// the fit part. Needs at least `2 * min_leaf_size` rows.
pub fn fit_tree(targets: &[f64], features: &FeatureMatrix, params: TreeParams, seed: u64) -> Result<Segmentation> {
    params.validate()?;
    features.check_len(targets.len())?;
    let required = 2 * params.min_leaf_size;
    if targets.len() < required {
        return Err(Error::TooFewRecords {
            records: targets.len(),
            required,
        });
    }
    let (fit_rows, estimation_rows) = rng::split_indices(targets.len(), params.fit_fraction, seed);
    let tree = SegmentTree::grow(targets, features, &fit_rows, params)?;
    Ok(Segmentation {
        tree,
        fit_rows,
        estimation_rows,
    })
}

/// Honest re-estimation of a fitted segmentation on its estimation rows.
pub fn honest_estimate(
    fitted: Segmentation,
    targets: &[f64],
    features: &FeatureMatrix,
    significance_level: f64,
) -> Segmentation {
    let tree = fitted.tree.honest_estimate(
        targets,
        features,
        &fitted.fit_rows,
        &fitted.estimation_rows,
        significance_level,
    );
    Segmentation { tree, ..fitted }
}

/// [`fit_tree`] followed by [`honest_estimate`].
pub fn segment_values(
    targets: &[f64],
    features: &FeatureMatrix,
    params: TreeParams,
    seed: u64,
) -> Result<Segmentation> {
    let fitted = fit_tree(targets, features, params, seed)?;
    Ok(honest_estimate(fitted, targets, features, params.significance_level))
}

/// Segments the normalized example attributions of `model` along `dims`.
pub fn segment_examples<S: AsRef<str>>(
    data: &EvalDataset,
    model: &str,
    dims: &[S],
    params: TreeParams,
    seed: u64,
) -> Result<Segmentation> {
    let targets = attribution::normalized_attributions(data, model)?;
    let features = FeatureMatrix::from_dataset(data, dims)?;
    let mut seg = segment_values(&targets, &features, params, seed)?;
    seg.tree.target = SegmentTarget::NormalizedAttribution {
        model: model.to_string(),
    };
    Ok(seg)
}

/// Per-record `normalized(model_a) - normalized(model_b)`.
pub fn attribution_deltas(data: &EvalDataset, model_a: &str, model_b: &str) -> Result<Vec<f64>> {
    let a = attribution::normalized_attributions(data, model_a)?;
    let b = attribution::normalized_attributions(data, model_b)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
}

/// Segments the difference in normalized attribution between two models.
pub fn segment_model_delta<S: AsRef<str>>(
    data: &EvalDataset,
    model_a: &str,
    model_b: &str,
    dims: &[S],
    params: TreeParams,
    seed: u64,
) -> Result<Segmentation> {
    let targets = attribution_deltas(data, model_a, model_b)?;
    let features = FeatureMatrix::from_dataset(data, dims)?;
    let mut seg = segment_values(&targets, &features, params, seed)?;
    seg.tree.target = SegmentTarget::DeltaAttribution {
        model_a: model_a.to_string(),
        model_b: model_b.to_string(),
    };
    Ok(seg)
}
