#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BIN: &str = env!("CARGO_BIN_EXE_aucslice");

pub const SCHEMA: &str = r#"{
  "label_column": "label",
  "score_columns": [
    {"model": "a", "column": "score_a"},
    {"model": "b", "column": "score_b"}
  ],
  "feature_columns": [
    {"name": "group", "kind": "categorical"},
    {"name": "age", "kind": "numeric"}
  ],
  "missing_value_token": "NA"
}"#;

pub const SIX_SCHEMA: &str = r#"{
  "label_column": "label",
  "score_columns": [{"model": "m", "column": "score"}],
  "feature_columns": [{"name": "slice", "kind": "categorical"}]
}"#;

pub const SIX: &str = "label,score,slice\n0,0.1,A\n1,0.5,A\n0,0.3,B\n1,0.2,B\n0,0.1,C\n1,0.5,C\n";

pub fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// `len` rows over groups X, Y, Z. Model `a` separates classes well except in
/// group Z, where its score is noise; model `b` is noise everywhere. About one
/// age in twenty is missing.
pub fn fixture_csv(len: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("label,score_a,score_b,group,age\n");
    for _ in 0..len {
        let label = rng.random_bool(0.4);
        let group = ["X", "Y", "Z"][rng.random_range(0..3)];
        let signal: f64 = if label { 0.65 } else { 0.35 };
        let a = if group == "Z" {
            rng.random::<f64>()
        } else {
            (signal + rng.random_range(-0.3..0.3)).clamp(0.0, 1.0)
        };
        let b = rng.random::<f64>();
        let age = if rng.random_bool(0.05) {
            "NA".to_string()
        } else {
            format!("{}", rng.random_range(18..80))
        };
        writeln!(out, "{},{a},{b},{group},{age}", label as u8).unwrap();
    }
    out
}

pub fn fixture(dir: &Path, len: usize, seed: u64) -> (PathBuf, PathBuf) {
    (
        write(dir, "data.csv", &fixture_csv(len, seed)),
        write(dir, "schema.json", SCHEMA),
    )
}

pub fn run<S: AsRef<std::ffi::OsStr>>(dir: &Path, args: &[S]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().unwrap()
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}
