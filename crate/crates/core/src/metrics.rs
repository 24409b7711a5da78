//! Per-example losses, aggregate AUC-ROC and ROC curves.
//!
//! AUC is the fraction of (positive, negative) pairs ordered correctly, ties
//! counting one half. It is computed here from mid-ranks in `O(m log m)`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::{EvalDataset, Partition};
use crate::{Error, Result};

/// Lower clamp applied to the probability of the true label before taking logs.
pub const CE_EPSILON: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    CeLoss,
    GiniImpurity,
}

/// One metric evaluated on every record of a dataset for one model.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricVector {
    pub kind: MetricKind,
    pub values: Vec<f64>,
}

impl MetricVector {
    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

fn true_label_probability(positive: bool, score: f64) -> f64 {
    if positive {
        score
    } else {
        1.0 - score
    }
}

/// Cross-entropy `-[y ln s + (1 - y) ln(1 - s)]` of one prediction.
pub fn ce_loss_one(positive: bool, score: f64) -> f64 {
    let p = true_label_probability(positive, score).max(CE_EPSILON);
    -libm::log(p)
}

/// Impurity `1 - p` where `p` is the probability given to the true label.
pub fn gini_impurity_one(positive: bool, score: f64) -> f64 {
    1.0 - true_label_probability(positive, score)
}

fn per_record(data: &EvalDataset, model: &str, kind: MetricKind, f: fn(bool, f64) -> f64) -> Result<MetricVector> {
    let m = data.schema().model_index(model)?;
    let values = data.records().iter().map(|r| f(r.is_positive(), r.scores[m])).collect();
    Ok(MetricVector { kind, values })
}

pub fn ce_loss(data: &EvalDataset, model: &str) -> Result<MetricVector> {
    per_record(data, model, MetricKind::CeLoss, ce_loss_one)
}

pub fn gini_impurity(data: &EvalDataset, model: &str) -> Result<MetricVector> {
    per_record(data, model, MetricKind::GiniImpurity, gini_impurity_one)
}

pub(crate) fn class_counts(labels: &[bool]) -> Result<(usize, usize)> {
    let p = labels.iter().filter(|&&l| l).count();
    let n = labels.len() - p;
    if p == 0 || n == 0 {
        return Err(Error::DegenerateLabels {
            positives: p,
            negatives: n,
        });
    }
    Ok((p, n))
}

pub(crate) fn check_lengths(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(())
}

/// Mann-Whitney U statistic: the summed pair credit `p * n * AUC`.
pub fn mann_whitney_u(labels: &[bool], scores: &[f64]) -> Result<f64> {
    check_lengths(labels.len(), scores.len())?;
    let (p, _) = class_counts(labels)?;

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Mid-ranks are multiples of 1/2, so the rank sum is exact.
    let mut positive_rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let mid_rank = (start + 1 + end) as f64 / 2.0;
        let tied_positives = order[start..end].iter().filter(|&&i| labels[i]).count();
        positive_rank_sum += mid_rank * tied_positives as f64;
        start = end;
    }
    Ok(positive_rank_sum - (p * (p + 1)) as f64 / 2.0)
}

pub fn auc_from_scores(labels: &[bool], scores: &[f64]) -> Result<f64> {
    let u = mann_whitney_u(labels, scores)?;
    let (p, n) = class_counts(labels)?;
    Ok(u / (p as f64 * n as f64))
}

pub fn auc(data: &EvalDataset, model: &str) -> Result<f64> {
    auc_from_scores(&data.labels(), &data.scores(model)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC curve from `(0, 0)` to `(1, 1)`, one vertex per distinct score.
#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// Trapezoidal area under the curve.
    pub fn area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
            .sum()
    }
}

pub fn roc_curve_from_scores(labels: &[bool], scores: &[f64]) -> Result<RocCurve> {
    check_lengths(labels.len(), scores.len())?;
    let (p, n) = class_counts(labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = Vec::with_capacity(order.len() + 1);
    points.push(RocPoint { fpr: 0.0, tpr: 0.0 });
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            if labels[order[end]] {
                tp += 1;
            } else {
                fp += 1;
            }
            end += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / n as f64,
            tpr: tp as f64 / p as f64,
        });
        start = end;
    }
    Ok(RocCurve { points })
}

pub fn roc_curve(data: &EvalDataset, model: &str) -> Result<RocCurve> {
    roc_curve_from_scores(&data.labels(), &data.scores(model)?)
}

/// Pearson product-moment correlation.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a.len(), b.len())?;
    if a.len() < 2 {
        return Err(Error::InvalidParameter("correlation needs at least two values".into()));
    }
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0))
}

/// Metrics of one partition cell, computed on the records of that cell only.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceMetrics {
    pub slice: String,
    pub count: usize,
    pub positives: usize,
    pub negatives: usize,
    /// `None` when the slice lacks one of the classes.
    pub auc: Option<f64>,
    pub mean_ce_loss: f64,
    pub mean_gini: f64,
}

pub fn slice_metrics(data: &EvalDataset, model: &str, partition: &Partition) -> Result<Vec<SliceMetrics>> {
    let labels = data.labels();
    let scores = data.scores(model)?;
    check_lengths(partition.assignment.len(), labels.len())?;
    let rows = (0..partition.cells())
        .map(|cell| {
            let members = partition.members(cell);
            let l: Vec<bool> = members.iter().map(|&i| labels[i]).collect();
            let s: Vec<f64> = members.iter().map(|&i| scores[i]).collect();
            let positives = l.iter().filter(|&&x| x).count();
            let ce: Vec<f64> = l.iter().zip(&s).map(|(&y, &p)| ce_loss_one(y, p)).collect();
            let gini: Vec<f64> = l.iter().zip(&s).map(|(&y, &p)| gini_impurity_one(y, p)).collect();
            SliceMetrics {
                slice: partition.labels[cell].clone(),
                count: members.len(),
                positives,
                negatives: members.len() - positives,
                auc: auc_from_scores(&l, &s).ok(),
                mean_ce_loss: mean(&ce),
                mean_gini: mean(&gini),
            }
        })
        .collect();
    Ok(rows)
}
