//! JSON documents and aligned text tables for each subcommand.

use aucslice_core::attribution::{CorrelationReport, ExampleAttribution, PairCredit};
use aucslice_core::metrics::SliceMetrics;
use aucslice_core::pairs::{CrossMatrix, CrossStatistic, PairSegmentRow};
use aucslice_core::segmentation::{SegmentTarget, SegmentTree, TreeParams};
use aucslice_core::stats::PValueMethod;
use serde::Serialize;

use crate::error::Result;
use crate::format::{fixed3, json_f64, json_opt_f64, sig17};
use crate::io::csv_error;

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serializes");
    out.push(b'\n');
    out
}

#[derive(Debug, Serialize)]
pub struct ModelMetrics {
    pub model: String,
    #[serde(serialize_with = "json_f64")]
    pub auc: f64,
    #[serde(serialize_with = "json_f64")]
    pub mean_ce_loss: f64,
    #[serde(serialize_with = "json_f64")]
    pub mean_gini: f64,
}

#[derive(Debug, Serialize)]
pub struct SliceModelMetrics {
    pub model: String,
    #[serde(serialize_with = "json_opt_f64")]
    pub auc: Option<f64>,
    #[serde(serialize_with = "json_f64")]
    pub mean_ce_loss: f64,
    #[serde(serialize_with = "json_f64")]
    pub mean_gini: f64,
}

#[derive(Debug, Serialize)]
pub struct SliceRow {
    pub slice: String,
    pub count: usize,
    pub positives: usize,
    pub negatives: usize,
    pub models: Vec<SliceModelMetrics>,
}

#[derive(Debug, Serialize)]
pub struct SliceTable {
    pub feature: String,
    pub rows: Vec<SliceRow>,
}

impl SliceTable {
    /// Merges per-model slice metrics (all over the same partition) by slice.
    pub fn new(feature: &str, per_model: Vec<(String, Vec<SliceMetrics>)>) -> Self {
        let cells = per_model.first().map_or(0, |(_, rows)| rows.len());
        let rows = (0..cells)
            .map(|i| {
                let first = &per_model[0].1[i];
                SliceRow {
                    slice: first.slice.clone(),
                    count: first.count,
                    positives: first.positives,
                    negatives: first.negatives,
                    models: per_model
                        .iter()
                        .map(|(model, rows)| SliceModelMetrics {
                            model: model.clone(),
                            auc: rows[i].auc,
                            mean_ce_loss: rows[i].mean_ce_loss,
                            mean_gini: rows[i].mean_gini,
                        })
                        .collect(),
                }
            })
            .collect();
        SliceTable {
            feature: feature.to_string(),
            rows,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MetricsReport {
    pub command: &'static str,
    pub records: usize,
    pub positives: usize,
    pub negatives: usize,
    pub models: Vec<ModelMetrics>,
    pub slices: Option<SliceTable>,
}

impl MetricsReport {
    pub fn text(&self) -> String {
        let mut out = format!(
            "{} records ({} positive, {} negative)\n\n",
            self.records, self.positives, self.negatives
        );
        let rows: Vec<Vec<String>> = self
            .models
            .iter()
            .map(|m| {
                vec![
                    m.model.clone(),
                    fixed3(m.auc),
                    fixed3(m.mean_ce_loss),
                    fixed3(m.mean_gini),
                ]
            })
            .collect();
        out += &table(&["Model", "AUC", "CE loss", "GINI"], &rows);
        if let Some(slices) = &self.slices {
            out += &format!("\nSlices by {}\n", slices.feature);
            let mut headers = vec![String::from("Slice"), String::from("Count")];
            for m in &self.models {
                let prefix = if self.models.len() > 1 {
                    format!("{} ", m.model)
                } else {
                    String::new()
                };
                headers.extend(["AUC", "CE loss", "GINI"].map(|h| format!("{prefix}{h}")));
            }
            let rows: Vec<Vec<String>> = slices
                .rows
                .iter()
                .map(|r| {
                    let mut row = vec![r.slice.clone(), r.count.to_string()];
                    for m in &r.models {
                        row.push(m.auc.map_or_else(|| "-".into(), fixed3));
                        row.push(fixed3(m.mean_ce_loss));
                        row.push(fixed3(m.mean_gini));
                    }
                    row
                })
                .collect();
            let headers: Vec<&str> = headers.iter().map(String::as_str).collect();
            out += &table(&headers, &rows);
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct Correlations {
    #[serde(serialize_with = "json_f64")]
    pub total_vs_ce_loss: f64,
    #[serde(serialize_with = "json_f64")]
    pub total_vs_gini: f64,
    #[serde(serialize_with = "json_f64")]
    pub normalized_vs_ce_loss: f64,
    #[serde(serialize_with = "json_f64")]
    pub normalized_vs_gini: f64,
}

impl From<CorrelationReport> for Correlations {
    fn from(r: CorrelationReport) -> Self {
        Correlations {
            total_vs_ce_loss: r.total_vs_ce_loss,
            total_vs_gini: r.total_vs_gini,
            normalized_vs_ce_loss: r.normalized_vs_ce_loss,
            normalized_vs_gini: r.normalized_vs_gini,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AttributeReport {
    pub command: &'static str,
    pub model: String,
    pub records: usize,
    pub positives: usize,
    pub negatives: usize,
    #[serde(serialize_with = "json_f64")]
    pub auc: f64,
    /// Sum of the pair credits, `p * n * AUC`.
    #[serde(serialize_with = "json_f64")]
    pub u_statistic: f64,
    #[serde(serialize_with = "json_f64")]
    pub total_attribution: f64,
    /// Absent when a series is constant.
    pub correlation: Option<Correlations>,
    pub correlation_error: Option<String>,
    pub pairs_written: Option<usize>,
}

impl AttributeReport {
    pub fn text(&self) -> String {
        let mut out = format!(
            "model {}: {} records ({} positive, {} negative), AUC {}, U {}\n",
            self.model,
            self.records,
            self.positives,
            self.negatives,
            fixed3(self.auc),
            fixed3(self.u_statistic)
        );
        match &self.correlation {
            Some(c) => {
                out += "\nPearson correlation of attributions with per-example losses\n";
                out += &table(
                    &["Attribution", "CE loss", "GINI"],
                    &[
                        vec!["total".into(), fixed3(c.total_vs_ce_loss), fixed3(c.total_vs_gini)],
                        vec![
                            "normalized".into(),
                            fixed3(c.normalized_vs_ce_loss),
                            fixed3(c.normalized_vs_gini),
                        ],
                    ],
                );
            }
            None => {
                out += &format!(
                    "correlation unavailable: {}\n",
                    self.correlation_error.as_deref().unwrap_or("unknown")
                )
            }
        }
        if let Some(n) = self.pairs_written {
            out += &format!("{n} pairs written\n");
        }
        out
    }
}

pub fn attributions_csv(rows: &[ExampleAttribution]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "label", "score", "total", "normalized"])
        .map_err(csv_error)?;
    for a in rows {
        w.write_record([
            a.index.to_string(),
            u8::from(a.positive).to_string(),
            sig17(a.score),
            sig17(a.total),
            sig17(a.normalized),
        ])
        .map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| csv_error(e.into_error().into()))
}

pub fn pairs_csv(pairs: &[PairCredit], scores: &[f64]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["pos_index", "neg_index", "pos_score", "neg_score", "credit"])
        .map_err(csv_error)?;
    for p in pairs {
        w.write_record([
            p.pos_index.to_string(),
            p.neg_index.to_string(),
            sig17(scores[p.pos_index]),
            sig17(scores[p.neg_index]),
            sig17(p.credit),
        ])
        .map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| csv_error(e.into_error().into()))
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetJson {
    Attribution { model: String },
    Delta { model_a: String, model_b: String },
    Pair { model: String },
    Values,
}

impl From<&SegmentTarget> for TargetJson {
    fn from(t: &SegmentTarget) -> Self {
        match t {
            SegmentTarget::NormalizedAttribution { model } => TargetJson::Attribution { model: model.clone() },
            SegmentTarget::DeltaAttribution { model_a, model_b } => TargetJson::Delta {
                model_a: model_a.clone(),
                model_b: model_b.clone(),
            },
            SegmentTarget::PairCredit { model } => TargetJson::Pair { model: model.clone() },
            SegmentTarget::Values => TargetJson::Values,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ParamsJson {
    pub max_depth: usize,
    pub min_leaf_size: usize,
    #[serde(serialize_with = "json_f64")]
    pub significance_level: f64,
    #[serde(serialize_with = "json_f64")]
    pub fit_fraction: f64,
    pub p_value: &'static str,
}

impl From<&TreeParams> for ParamsJson {
    fn from(p: &TreeParams) -> Self {
        ParamsJson {
            max_depth: p.max_depth,
            min_leaf_size: p.min_leaf_size,
            significance_level: p.significance_level,
            fit_fraction: p.fit_fraction,
            p_value: match p.p_value_method {
                PValueMethod::NormalApprox => "normal",
                PValueMethod::StudentT => "student_t",
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SplitJson {
    pub feature: String,
    pub left: String,
    pub right: String,
    pub left_child: usize,
    pub right_child: usize,
    #[serde(serialize_with = "json_f64")]
    pub gain: f64,
}

#[derive(Debug, Serialize)]
pub struct NodeJson {
    pub node: usize,
    pub depth: usize,
    pub parent: Option<usize>,
    pub is_leaf: bool,
    pub description: String,
    pub conditions: Vec<String>,
    pub split: Option<SplitJson>,
    pub fit_count: usize,
    #[serde(serialize_with = "json_f64")]
    pub fit_mean: f64,
    pub est_count: usize,
    #[serde(serialize_with = "json_opt_f64")]
    pub honest_mean: Option<f64>,
    #[serde(serialize_with = "json_f64")]
    pub t_statistic: f64,
    #[serde(serialize_with = "json_f64")]
    pub p_value: f64,
    pub false_discovery: bool,
}

#[derive(Debug, Serialize)]
pub struct LeafJson {
    pub node: usize,
    pub description: String,
    pub negative_slice: Option<String>,
    pub positive_slice: Option<String>,
    pub est_count: usize,
    #[serde(serialize_with = "json_opt_f64")]
    pub honest_mean: Option<f64>,
    #[serde(serialize_with = "json_f64")]
    pub p_value: f64,
    pub false_discovery: bool,
}

#[derive(Debug, Serialize)]
pub struct SegmentReport {
    pub command: &'static str,
    pub target: TargetJson,
    pub dims: Vec<String>,
    pub seed: u64,
    pub params: ParamsJson,
    /// Number of sampled pairs for pair trees.
    pub pairs: Option<usize>,
    pub fit_count: usize,
    pub estimation_count: usize,
    pub nodes: Vec<NodeJson>,
    pub leaves: Vec<LeafJson>,
}

impl SegmentReport {
    pub fn new(
        command: &'static str,
        tree: &SegmentTree,
        dims: &[String],
        seed: u64,
        fit_count: usize,
        estimation_count: usize,
        pair_rows: Option<(usize, Vec<PairSegmentRow>)>,
    ) -> Self {
        let report = tree.report();
        let nodes: Vec<NodeJson> = report
            .iter()
            .zip(tree.nodes())
            .map(|(row, node)| NodeJson {
                node: row.node,
                depth: row.depth,
                parent: node.parent.map(|(p, _)| p),
                is_leaf: row.is_leaf,
                description: row.description.clone(),
                conditions: row.conditions.clone(),
                split: node.split.as_ref().map(|s| SplitJson {
                    feature: s.rule.feature.clone(),
                    left: s.rule.describe(true),
                    right: s.rule.describe(false),
                    left_child: s.left,
                    right_child: s.right,
                    gain: s.gain,
                }),
                fit_count: row.fit_count,
                fit_mean: row.fit_mean,
                est_count: row.est_count,
                honest_mean: row.honest_mean,
                t_statistic: row.t_statistic,
                p_value: row.p_value,
                false_discovery: row.false_discovery,
            })
            .collect();
        let (pairs, pair_rows) = match pair_rows {
            Some((n, rows)) => (Some(n), Some(rows)),
            None => (None, None),
        };
        let leaves = tree
            .leaves()
            .into_iter()
            .map(|id| {
                let row = &report[id];
                let pair = pair_rows.as_ref().and_then(|rows| rows.iter().find(|r| r.node == id));
                LeafJson {
                    node: id,
                    description: row.description.clone(),
                    negative_slice: pair.map(|p| p.negative_slice.clone()),
                    positive_slice: pair.map(|p| p.positive_slice.clone()),
                    est_count: row.est_count,
                    honest_mean: row.honest_mean,
                    p_value: row.p_value,
                    false_discovery: row.false_discovery,
                }
            })
            .collect();
        SegmentReport {
            command,
            target: tree.target().into(),
            dims: dims.to_vec(),
            seed,
            params: tree.params().into(),
            pairs,
            fit_count,
            estimation_count,
            nodes,
            leaves,
        }
    }

    /// Leaf table; pair trees use negative and positive slice columns.
    pub fn text(&self) -> String {
        let value_name = match self.target {
            TargetJson::Attribution { .. } => "AUC attribution",
            TargetJson::Delta { .. } => "Attribution delta",
            TargetJson::Pair { .. } => "AUC Attribution",
            TargetJson::Values => "Mean",
        };
        let honest = |l: &LeafJson| {
            let mean = l.honest_mean.map_or_else(|| "-".into(), fixed3);
            if l.false_discovery {
                format!("{mean}*")
            } else {
                mean
            }
        };
        let mut out = String::new();
        if let Some(n) = self.pairs {
            out += &format!("{n} sampled pairs\n");
        }
        out += &format!(
            "fit on {} rows, estimated on {}\n\n",
            self.fit_count, self.estimation_count
        );
        if matches!(self.target, TargetJson::Pair { .. }) {
            let rows: Vec<Vec<String>> = self
                .leaves
                .iter()
                .map(|l| {
                    vec![
                        l.negative_slice.clone().unwrap_or_default(),
                        l.positive_slice.clone().unwrap_or_default(),
                        l.est_count.to_string(),
                        honest(l),
                    ]
                })
                .collect();
            out += &table(&["Negative Slice", "Positive Slice", "Count", value_name], &rows);
        } else {
            let rows: Vec<Vec<String>> = self
                .leaves
                .iter()
                .map(|l| vec![l.description.clone(), l.est_count.to_string(), honest(l)])
                .collect();
            out += &table(&["Segment", "Count", value_name], &rows);
        }
        out += &format!(
            "\nHonest estimates from the held-out half; * marks leaves whose halves differ (p < {}).\n",
            self.params.significance_level
        );
        out
    }
}

#[derive(Debug, Serialize)]
pub struct CrossReport {
    pub command: &'static str,
    pub model: String,
    pub feature: String,
    pub kind: &'static str,
    /// Row `i` is the positive example's cell, column `j` the negative's.
    pub categories: Vec<String>,
    pub cells: Vec<Vec<OptF64>>,
    pub pair_counts: Vec<Vec<u64>>,
    pub total_pairs: u64,
    #[serde(serialize_with = "json_f64")]
    pub auc: f64,
}

#[derive(Debug, Serialize)]
#[serde(transparent)]
pub struct OptF64(#[serde(serialize_with = "json_opt_f64")] pub Option<f64>);

pub fn kind_name(statistic: CrossStatistic) -> &'static str {
    match statistic {
        CrossStatistic::MeanPairAttribution => "mean",
        CrossStatistic::IncorrectPairCount => "headroom",
    }
}

impl CrossReport {
    pub fn new(model: &str, m: &CrossMatrix, auc: f64) -> Self {
        let k = m.size();
        CrossReport {
            command: "cross",
            model: model.to_string(),
            feature: m.feature.clone(),
            kind: kind_name(m.statistic),
            categories: m.categories.clone(),
            cells: (0..k).map(|i| (0..k).map(|j| OptF64(m.cell(i, j))).collect()).collect(),
            pair_counts: (0..k).map(|i| (0..k).map(|j| m.pair_count(i, j)).collect()).collect(),
            total_pairs: m.total_pairs(),
            auc,
        }
    }

    pub fn text(&self) -> String {
        let mut headers = vec![String::from("Positive \\ Negative")];
        headers.extend(self.categories.iter().cloned());
        let rows: Vec<Vec<String>> = self
            .categories
            .iter()
            .zip(&self.cells)
            .map(|(name, cells)| {
                let mut row = vec![name.clone()];
                row.extend(cells.iter().map(|c| c.0.map_or_else(|| "-".into(), fixed3)));
                row
            })
            .collect();
        let headers: Vec<&str> = headers.iter().map(String::as_str).collect();
        let title = match self.kind {
            "mean" => "Mean pair attribution",
            _ => "Incorrectly ordered pairs",
        };
        format!(
            "{title} over {} (model {}, AUC {})\n\n{}",
            self.feature,
            self.model,
            fixed3(self.auc),
            table(&headers, &rows)
        )
    }

    /// Matrix as CSV: one row per positive cell, one column per negative
    /// cell, empty crosses left blank.
    pub fn csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![String::from("positive_slice")];
        header.extend(self.categories.iter().cloned());
        w.write_record(&header).map_err(csv_error)?;
        for (name, cells) in self.categories.iter().zip(&self.cells) {
            let mut row = vec![name.clone()];
            row.extend(cells.iter().map(|c| c.0.map(sig17).unwrap_or_default()));
            w.write_record(&row).map_err(csv_error)?;
        }
        w.into_inner().map_err(|e| csv_error(e.into_error().into()))
    }
}

/// Left-aligned first column, right-aligned remaining columns.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells
            .zip(&widths)
            .enumerate()
            .map(
                |(i, (c, &w))| {
                    if i == 0 {
                        format!("{c:<w$}")
                    } else {
                        format!("{c:>w$}")
                    }
                },
            )
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&mut headers.iter().copied());
    out += &(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("  ") + "\n");
    for row in rows {
        out += &line(&mut row.iter().map(String::as_str));
    }
    out
}
