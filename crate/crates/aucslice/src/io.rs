//! Delimited-text datasets, JSON schema files and atomic output files.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use aucslice_core::dataset::{EvalDataset, EvalRecord, FeatureKind, FeatureValue, SchemaConfig};
use aucslice_core::Error;

use crate::error::{AppError, Result};
use crate::format::sig17;

pub fn load_schema(path: &Path) -> Result<SchemaConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let schema: SchemaConfig = serde_json::from_str(&text).map_err(|e| AppError::format(path, e))?;
    schema.validate()?;
    Ok(schema)
}

pub fn load_dataset(path: &Path, schema: &SchemaConfig) -> Result<EvalDataset> {
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    read_dataset(file, schema, path)
}

fn delimiter_byte(schema: &SchemaConfig) -> Result<u8> {
    u8::try_from(schema.delimiter).ok().filter(u8::is_ascii).ok_or_else(|| {
        Error::InvalidSchema(format!(
            "delimiter {:?} is not a single ASCII character",
            schema.delimiter
        ))
        .into()
    })
}

/// Parses a headed delimited file. `source` names the input in errors.
pub fn read_dataset<R: Read>(input: R, schema: &SchemaConfig, source: &Path) -> Result<EvalDataset> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter_byte(schema)?)
        .flexible(true)
        .from_reader(input);
    let header = reader.headers().map_err(|e| AppError::format(source, e))?.clone();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let label_at = find(&schema.label_column)?;
    let score_at = schema
        .score_columns
        .iter()
        .map(|c| find(&c.column))
        .collect::<Result<Vec<_>, _>>()?;
    let feature_at = schema
        .feature_columns
        .iter()
        .map(|c| find(&c.name))
        .collect::<Result<Vec<_>, _>>()?;
    let missing = schema.missing_value_token.trim();

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| AppError::format(source, e))?;
        if row.len() != header.len() {
            return Err(Error::RecordShape {
                row: row_no,
                expected: header.len(),
                found: row.len(),
            }
            .into());
        }
        let label = match row[label_at].trim().parse::<f64>() {
            Ok(0.0) => 0,
            Ok(1.0) => 1,
            _ => return Err(Error::LabelNotBinary { row: row_no }.into()),
        };
        let mut scores = Vec::with_capacity(score_at.len());
        for (&at, column) in score_at.iter().zip(&schema.score_columns) {
            let score = row[at].trim().parse::<f64>().map_err(|_| Error::UnparseableValue {
                row: row_no,
                column: column.column.clone(),
            })?;
            scores.push(score);
        }
        let mut features = Vec::with_capacity(feature_at.len());
        for (&at, column) in feature_at.iter().zip(&schema.feature_columns) {
            let cell = row[at].trim();
            let value = if cell.is_empty() || cell == missing {
                FeatureValue::Missing
            } else {
                match column.kind {
                    FeatureKind::Categorical => FeatureValue::Categorical(cell.to_string()),
                    FeatureKind::Numeric => match cell.parse::<f64>() {
                        Ok(v) if !v.is_nan() => FeatureValue::Numeric(v),
                        _ => {
                            return Err(Error::UnparseableValue {
                                row: row_no,
                                column: column.name.clone(),
                            }
                            .into())
                        }
                    },
                }
            };
            features.push(value);
        }
        records.push(EvalRecord::new(label, scores, features));
    }
    Ok(EvalDataset::new(schema.clone(), records)?)
}

/// The dataset as delimited text in schema column order. Numbers carry 17
/// significant digits, so loading the text back reproduces them exactly.
pub fn dataset_to_csv(data: &EvalDataset) -> Result<Vec<u8>> {
    let schema = data.schema();
    let mut writer = csv::WriterBuilder::new()
        .delimiter(delimiter_byte(schema)?)
        .from_writer(Vec::new());
    let mut header = vec![schema.label_column.clone()];
    header.extend(schema.score_columns.iter().map(|c| c.column.clone()));
    header.extend(schema.feature_columns.iter().map(|c| c.name.clone()));
    writer.write_record(&header).map_err(csv_error)?;
    for record in data.records() {
        let mut row = vec![record.label.to_string()];
        row.extend(record.scores.iter().map(|&s| sig17(s)));
        row.extend(record.features.iter().map(|f| match f {
            FeatureValue::Numeric(v) => sig17(*v),
            FeatureValue::Categorical(t) => t.clone(),
            FeatureValue::Missing => schema.missing_value_token.clone(),
        }));
        writer.write_record(&row).map_err(csv_error)?;
    }
    writer.into_inner().map_err(|e| csv_error(e.into_error().into()))
}

pub fn save_dataset(path: &Path, data: &EvalDataset) -> Result<()> {
    write_atomic(path, &dataset_to_csv(data)?)
}

pub(crate) fn csv_error(e: csv::Error) -> AppError {
    AppError::format("<memory>", e)
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let staged = stage(path, bytes)?;
    staged.persist(path).map_err(|e| AppError::io(path, e.error))?;
    Ok(())
}

fn stage(path: &Path, bytes: &[u8]) -> Result<tempfile::NamedTempFile> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir).map_err(|e| AppError::io(path, e))?;
    file.write_all(bytes).map_err(|e| AppError::io(path, e))?;
    file.flush().map_err(|e| AppError::io(path, e))?;
    Ok(file)
}

/// Everything a command produces, written only once all of it is ready.
#[derive(Debug, Default)]
pub struct Outputs {
    pub stdout: Vec<u8>,
    pub files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn file(&mut self, path: &Path, bytes: Vec<u8>) {
        self.files.push((path.to_path_buf(), bytes));
    }

    /// Stages every file before renaming any into place, then prints stdout.
    pub fn commit(self, stdout: &mut (impl Write + ?Sized)) -> Result<()> {
        let staged = self
            .files
            .iter()
            .map(|(path, bytes)| stage(path, bytes))
            .collect::<Result<Vec<_>>>()?;
        for (file, (path, _)) in staged.into_iter().zip(&self.files) {
            file.persist(path).map_err(|e| AppError::io(path, e.error))?;
        }
        stdout
            .write_all(&self.stdout)
            .and_then(|_| stdout.flush())
            .map_err(|e| AppError::io("<stdout>", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> SchemaConfig {
        SchemaConfig::new("y", [("m", "s")]).with_feature("Slice", FeatureKind::Categorical)
    }

    fn read(text: &str) -> Result<EvalDataset> {
        read_dataset(text.as_bytes(), &schema(), Path::new("t.csv"))
    }

    #[test]
    fn six_examples() {
        let d = read("y,s,Slice\n0,0.1,A\n1,0.5,A\n0,0.3,B\n1,0.2,B\n0,0.1,C\n1,0.5,C\n").unwrap();
        assert_eq!((d.positives(), d.negatives()), (3, 3));
    }

    #[test]
    fn data_errors_carry_context() {
        let e = |text: &str| match read(text) {
            Err(AppError::Core(e)) => e,
            other => panic!("{other:?}"),
        };
        assert_eq!(e("y,s\n0,0.1\n"), Error::MissingColumn("Slice".into()));
        assert_eq!(
            e("y,s,Slice\n0,0.1,A\n1,1.3,A\n"),
            Error::ScoreOutOfRange {
                row: 2,
                model: "m".into()
            }
        );
        assert_eq!(e("y,s,Slice\n2,0.1,A\n"), Error::LabelNotBinary { row: 1 });
        assert_eq!(
            e("y,s,Slice\n1,,A\n"),
            Error::UnparseableValue {
                row: 1,
                column: "s".into()
            }
        );
        assert_eq!(
            e("y,s,Slice\n1,0.2\n"),
            Error::RecordShape {
                row: 1,
                expected: 3,
                found: 2
            }
        );
    }

    #[test]
    fn missing_tokens_and_delimiter() {
        let mut s = schema().with_feature("age", FeatureKind::Numeric);
        s.missing_value_token = "NA".into();
        s.delimiter = ';';
        let d = read_dataset("y;s;Slice;age\n1;0.5;NA;\n0;0.25;B;NA\n".as_bytes(), &s, Path::new("t")).unwrap();
        assert!(d.records()[0].features.iter().all(FeatureValue::is_missing));
        assert!(d.records()[1].features[1].is_missing());
        let back = read_dataset(&dataset_to_csv(&d).unwrap()[..], &s, Path::new("t")).unwrap();
        assert_eq!(back, d);
    }
}
