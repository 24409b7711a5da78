use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Broad category of an [`Error`], used by front ends to pick an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// The caller asked for something that does not exist or is malformed.
    Usage,
    /// The input data failed validation.
    Data,
    /// The data is valid but the requested quantity is undefined for it.
    Compute,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: cannot parse value in column `{column}`")]
    UnparseableValue { row: usize, column: String },
    #[error("row {row}: label is not 0 or 1")]
    LabelNotBinary { row: usize },
    #[error("row {row}: score for model `{model}` is outside [0, 1]")]
    ScoreOutOfRange { row: usize, model: String },
    #[error("row {row}: expected {expected} values, found {found}")]
    RecordShape { row: usize, expected: usize, found: usize },
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("feature `{0}` is not categorical; supply bin edges to cross it")]
    NonCategoricalFeature(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("DegenerateLabels: AUC is undefined with {positives} positive and {negatives} negative examples")]
    DegenerateLabels { positives: usize, negatives: usize },
    #[error("ZeroVariance: correlation is undefined for a constant series")]
    ZeroVariance,
    #[error("LengthMismatch: series lengths {left} and {right} differ")]
    LengthMismatch { left: usize, right: usize },
    #[error("TooFewRecords: {records} records, at least {required} required")]
    TooFewRecords { records: usize, required: usize },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::MissingColumn(_)
            | Error::UnparseableValue { .. }
            | Error::LabelNotBinary { .. }
            | Error::ScoreOutOfRange { .. }
            | Error::RecordShape { .. }
            | Error::InvalidSchema(_)
            | Error::EmptyDataset => ErrorClass::Data,
            Error::UnknownModel(_)
            | Error::UnknownFeature(_)
            | Error::NonCategoricalFeature(_)
            | Error::InvalidParameter(_) => ErrorClass::Usage,
            Error::DegenerateLabels { .. }
            | Error::ZeroVariance
            | Error::LengthMismatch { .. }
            | Error::TooFewRecords { .. } => ErrorClass::Compute,
        }
    }
}
