//! Typed, validated evaluation data.
//!
//! An [`EvalDataset`] holds held-out examples with a binary label, one
//! probability score per registered model and a set of slicing features.
//! It is immutable once built; the class counts are derived from the labels.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::rng;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreColumn {
    pub model: String,
    pub column: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    pub kind: FeatureKind,
}

fn default_delimiter() -> char {
    ','
}

/// Column layout of an evaluation file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaConfig {
    pub label_column: String,
    pub score_columns: Vec<ScoreColumn>,
    #[serde(default)]
    pub feature_columns: Vec<FeatureColumn>,
    /// Token marking a missing feature value. Empty cells are always missing.
    #[serde(default)]
    pub missing_value_token: String,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
}

impl SchemaConfig {
    /// Schema with the given label column and `(model, column)` score columns
    /// and no features.
    pub fn new<'a>(label_column: &str, scores: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        SchemaConfig {
            label_column: label_column.to_string(),
            score_columns: scores
                .into_iter()
                .map(|(model, column)| ScoreColumn {
                    model: model.to_string(),
                    column: column.to_string(),
                })
                .collect(),
            feature_columns: Vec::new(),
            missing_value_token: String::new(),
            delimiter: default_delimiter(),
        }
    }

    pub fn with_feature(mut self, name: &str, kind: FeatureKind) -> Self {
        self.feature_columns.push(FeatureColumn {
            name: name.to_string(),
            kind,
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.score_columns.is_empty() {
            return Err(Error::InvalidSchema("at least one score column is required".into()));
        }
        let mut columns = BTreeSet::new();
        let names = core::iter::once(&self.label_column)
            .chain(self.score_columns.iter().map(|s| &s.column))
            .chain(self.feature_columns.iter().map(|f| &f.name));
        for name in names {
            if !columns.insert(name.as_str()) {
                return Err(Error::InvalidSchema(format!("column `{name}` is declared twice")));
            }
        }
        let mut models = BTreeSet::new();
        for score in &self.score_columns {
            if !models.insert(score.model.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "model `{}` is declared twice",
                    score.model
                )));
            }
        }
        Ok(())
    }

    pub fn model_index(&self, model: &str) -> Result<usize> {
        self.score_columns
            .iter()
            .position(|s| s.model == model)
            .ok_or_else(|| Error::UnknownModel(model.to_string()))
    }

    pub fn feature_index(&self, feature: &str) -> Result<usize> {
        self.feature_columns
            .iter()
            .position(|f| f.name == feature)
            .ok_or_else(|| Error::UnknownFeature(feature.to_string()))
    }

    pub fn model_names(&self) -> impl Iterator<Item = &str> {
        self.score_columns.iter().map(|s| s.model.as_str())
    }

    /// Display name used for the missing-value category of a partition.
    pub fn missing_label(&self) -> &str {
        if self.missing_value_token.is_empty() {
            "(missing)"
        } else {
            &self.missing_value_token
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FeatureValue {
    Numeric(f64),
    Categorical(String),
    Missing,
}

impl FeatureValue {
    pub fn is_missing(&self) -> bool {
        matches!(self, FeatureValue::Missing)
    }
}

impl From<f64> for FeatureValue {
    fn from(v: f64) -> Self {
        FeatureValue::Numeric(v)
    }
}

impl From<&str> for FeatureValue {
    fn from(v: &str) -> Self {
        FeatureValue::Categorical(v.to_string())
    }
}

/// One held-out example.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRecord {
    pub label: u8,
    /// One score per model, in schema order.
    pub scores: Vec<f64>,
    /// One value per feature, in schema order.
    pub features: Vec<FeatureValue>,
}

impl EvalRecord {
    pub fn new(label: u8, scores: Vec<f64>, features: Vec<FeatureValue>) -> Self {
        EvalRecord {
            label,
            scores,
            features,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.label == 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalDataset {
    schema: SchemaConfig,
    records: Vec<EvalRecord>,
    positives: usize,
    negatives: usize,
}

impl EvalDataset {
    /// Validates `records` against `schema`. Row numbers in errors are 1-based.
    pub fn new(schema: SchemaConfig, records: Vec<EvalRecord>) -> Result<Self> {
        schema.validate()?;
        for (i, record) in records.iter().enumerate() {
            validate_record(&schema, record, i + 1)?;
        }
        let positives = records.iter().filter(|r| r.is_positive()).count();
        let negatives = records.len() - positives;
        Ok(EvalDataset {
            schema,
            records,
            positives,
            negatives,
        })
    }

    pub fn schema(&self) -> &SchemaConfig {
        &self.schema
    }

    pub fn records(&self) -> &[EvalRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Number of label-1 records (`p`).
    pub fn positives(&self) -> usize {
        self.positives
    }

    /// Number of label-0 records (`n`).
    pub fn negatives(&self) -> usize {
        self.negatives
    }

    pub fn labels(&self) -> Vec<bool> {
        self.records.iter().map(EvalRecord::is_positive).collect()
    }

    pub fn scores(&self, model: &str) -> Result<Vec<f64>> {
        let m = self.schema.model_index(model)?;
        Ok(self.records.iter().map(|r| r.scores[m]).collect())
    }

    /// Records at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> EvalDataset {
        let records: Vec<EvalRecord> = indices.iter().map(|&i| self.records[i].clone()).collect();
        let positives = records.iter().filter(|r| r.is_positive()).count();
        EvalDataset {
            schema: self.schema.clone(),
            negatives: records.len() - positives,
            positives,
            records,
        }
    }

    /// Errors with `DegenerateLabels` unless both classes are present.
    pub fn require_both_classes(&self) -> Result<()> {
        if self.positives == 0 || self.negatives == 0 {
            return Err(Error::DegenerateLabels {
                positives: self.positives,
                negatives: self.negatives,
            });
        }
        Ok(())
    }
}

fn validate_record(schema: &SchemaConfig, record: &EvalRecord, row: usize) -> Result<()> {
    if record.label > 1 {
        return Err(Error::LabelNotBinary { row });
    }
    if record.scores.len() != schema.score_columns.len() {
        return Err(Error::RecordShape {
            row,
            expected: schema.score_columns.len(),
            found: record.scores.len(),
        });
    }
    for (score, column) in record.scores.iter().zip(&schema.score_columns) {
        if !(0.0..=1.0).contains(score) {
            return Err(Error::ScoreOutOfRange {
                row,
                model: column.model.clone(),
            });
        }
    }
    if record.features.len() != schema.feature_columns.len() {
        return Err(Error::RecordShape {
            row,
            expected: schema.feature_columns.len(),
            found: record.features.len(),
        });
    }
    for (value, column) in record.features.iter().zip(&schema.feature_columns) {
        let ok = match (value, column.kind) {
            (FeatureValue::Missing, _) => true,
            (FeatureValue::Numeric(v), FeatureKind::Numeric) => !v.is_nan(),
            (FeatureValue::Categorical(_), FeatureKind::Categorical) => true,
            _ => false,
        };
        if !ok {
            return Err(Error::UnparseableValue {
                row,
                column: column.name.clone(),
            });
        }
    }
    Ok(())
}

/// Splits `data` into two datasets. The first receives
/// `floor(fraction * len)` records picked by a seeded shuffle; both parts keep
/// the input's relative record order.
pub fn split_dataset(data: &EvalDataset, fraction: f64, seed: u64) -> Result<(EvalDataset, EvalDataset)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_fraction(fraction)?;
    let (first, second) = rng::split_indices(data.len(), fraction, seed);
    Ok((data.subset(&first), data.subset(&second)))
}

pub(crate) fn check_fraction(fraction: f64) -> Result<()> {
    if fraction > 0.0 && fraction < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "fraction must lie strictly between 0 and 1, got {fraction}"
        )))
    }
}

/// Assignment of every record to one cell of a partition `{A_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub feature: String,
    /// Cell names in display order.
    pub labels: Vec<String>,
    /// Cell index for each record.
    pub assignment: Vec<usize>,
}

impl Partition {
    /// One cell per distinct token of a categorical feature, in lexicographic
    /// order, with missing values collected in a trailing cell.
    pub fn categorical(data: &EvalDataset, feature: &str) -> Result<Self> {
        let f = data.schema().feature_index(feature)?;
        if data.schema().feature_columns[f].kind != FeatureKind::Categorical {
            return Err(Error::NonCategoricalFeature(feature.to_string()));
        }
        let mut tokens = BTreeSet::new();
        let mut any_missing = false;
        for record in data.records() {
            match &record.features[f] {
                FeatureValue::Categorical(t) => {
                    tokens.insert(t.as_str());
                }
                _ => any_missing = true,
            }
        }
        let mut labels: Vec<String> = tokens.iter().map(|t| t.to_string()).collect();
        let missing_cell = labels.len();
        let assignment = data
            .records()
            .iter()
            .map(|r| match &r.features[f] {
                FeatureValue::Categorical(t) => labels.binary_search(t).unwrap_or(missing_cell),
                _ => missing_cell,
            })
            .collect();
        if any_missing {
            labels.push(data.schema().missing_label().to_string());
        }
        Ok(Partition {
            feature: feature.to_string(),
            labels,
            assignment,
        })
    }

    /// Bins a numeric feature at strictly increasing `edges`: `<=e1`,
    /// `(e1, e2]`, ..., `>ek`, plus a trailing cell for missing values.
    pub fn binned(data: &EvalDataset, feature: &str, edges: &[f64]) -> Result<Self> {
        let f = data.schema().feature_index(feature)?;
        if data.schema().feature_columns[f].kind != FeatureKind::Numeric {
            return Err(Error::InvalidParameter(format!(
                "bin edges apply to numeric features; `{feature}` is categorical"
            )));
        }
        if edges.is_empty() || edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "bin edges must be finite and strictly increasing".into(),
            ));
        }
        let mut labels = Vec::with_capacity(edges.len() + 2);
        labels.push(format!("<={}", edges[0]));
        for w in edges.windows(2) {
            labels.push(format!("({}, {}]", w[0], w[1]));
        }
        labels.push(format!(">{}", edges[edges.len() - 1]));
        let missing_cell = labels.len();
        let mut any_missing = false;
        let assignment = data
            .records()
            .iter()
            .map(|r| match r.features[f] {
                FeatureValue::Numeric(v) => edges.partition_point(|&e| e < v),
                _ => {
                    any_missing = true;
                    missing_cell
                }
            })
            .collect();
        if any_missing {
            labels.push(data.schema().missing_label().to_string());
        }
        Ok(Partition {
            feature: feature.to_string(),
            labels,
            assignment,
        })
    }

    pub fn cells(&self) -> usize {
        self.labels.len()
    }

    /// Record indices falling in cell `cell`.
    pub fn members(&self, cell: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == cell)
            .map(|(i, _)| i)
            .collect()
    }
}
