//! Command-line front end.
//!
//! Every command computes all of its outputs in memory first; files are then
//! staged next to their targets and renamed into place, so a failing run
//! leaves no partial output behind.

use std::ffi::OsString;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::PathBuf;

use aucslice_core::attribution::{self, PairSample};
use aucslice_core::dataset::{EvalDataset, Partition};
use aucslice_core::metrics;
use aucslice_core::pairs::{self, CrossStatistic};
use aucslice_core::rng::derive_seed;
use aucslice_core::segmentation::{self, Segmentation, TreeParams};
use aucslice_core::stats::PValueMethod;
use aucslice_core::ErrorClass;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{AppError, Result};
use crate::io::{load_dataset, load_schema, Outputs};
use crate::report::{self, AttributeReport, CrossReport, MetricsReport, ModelMetrics, SegmentReport, SliceTable};
use crate::{dot, parallel, svg};

#[derive(Debug, Parser)]
#[command(
    name = "aucslice",
    version,
    about = "Attribute a classifier's AUC-ROC to examples and pairs, then segment the attributions"
)]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Evaluation data: delimited text with a header row
    #[arg(long, global = true, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// JSON file naming the label, score and feature columns
    #[arg(long, global = true, value_name = "FILE")]
    pub schema: Option<PathBuf>,
    /// Seed for every random choice (fit/estimation splits, pair sampling)
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for data-parallel steps [default: one per core]
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<NonZeroUsize>,
    /// JSON object of flag values; flags given on the command line win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// AUC, mean CE loss and mean GINI impurity per model, optionally per slice
    Metrics(MetricsArgs),
    /// Per-example AUC attributions as CSV, optionally the pair table
    Attribute(AttributeArgs),
    /// Segment attributions with an honestly estimated regression tree
    Segment(SegmentArgs),
    /// Segment the per-example attribution difference between two models
    SegmentDelta(SegmentDeltaArgs),
    /// Mean pair attribution or incorrect-pair counts over a partition's crosses
    Cross(CrossArgs),
    /// Segment sampled pair credits along positive and negative features
    SegmentPairs(SegmentPairsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report to FILE instead of standard output
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Models to report, comma separated [default: all]
    #[arg(long, value_delimiter = ',')]
    pub model: Vec<String>,
    /// Also report every slice of this feature
    #[arg(long, value_name = "FEATURE")]
    pub slice_by: Option<String>,
    /// Bin edges for a numeric --slice-by feature, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub bins: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AttributeArgs {
    /// Model to attribute [default: first in the schema]
    #[arg(long)]
    pub model: Option<String>,
    /// CSV of per-example attributions
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// CSV of every (sampled) positive-negative pair with its credit
    #[arg(long, value_name = "FILE")]
    pub pairs_out: Option<PathBuf>,
    /// Sample at most this many positives for the pair table
    #[arg(long)]
    pub max_pos: Option<usize>,
    /// Sample at most this many negatives for the pair table
    #[arg(long)]
    pub max_neg: Option<usize>,
    /// Format of the summary printed on standard output
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    /// Features to segment along, comma separated [default: all features]
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<String>>,
    #[arg(long, default_value_t = 3)]
    pub max_depth: usize,
    /// Minimum fit-half rows per leaf [default: 100, 1000 for pair trees]
    #[arg(long)]
    pub min_leaf: Option<usize>,
    /// Significance level of the false-discovery test
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Share of rows used to grow the tree; the rest estimate it
    #[arg(long, default_value_t = 0.5)]
    pub fit_fraction: f64,
    /// Student-t p-values instead of the normal approximation
    #[arg(long)]
    pub exact_p: bool,
    /// Write the tree as Graphviz DOT
    #[arg(long, value_name = "FILE")]
    pub dot_out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Attribution,
    Delta(String),
    Pair,
}

fn parse_target(s: &str) -> Result<Target, String> {
    match s {
        "attribution" => Ok(Target::Attribution),
        "pair" => Ok(Target::Pair),
        _ => match s.strip_prefix("delta:") {
            Some(b) if !b.is_empty() => Ok(Target::Delta(b.to_string())),
            _ => Err(format!("expected attribution, delta:MODEL_B or pair, got `{s}`")),
        },
    }
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Model whose attributions are segmented [default: first in the schema]
    #[arg(long)]
    pub model: Option<String>,
    /// attribution, delta:MODEL_B or pair
    #[arg(long, value_parser = parse_target, default_value = "attribution")]
    pub target: Target,
    /// Pairs to sample for --target pair
    #[arg(long, default_value_t = 10_000)]
    pub pair_budget: usize,
    #[command(flatten)]
    pub tree: TreeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SegmentDeltaArgs {
    #[arg(long)]
    pub model_a: String,
    #[arg(long)]
    pub model_b: String,
    #[command(flatten)]
    pub tree: TreeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CrossKind {
    /// Fraction of correctly ordered pairs
    Mean,
    /// Number of incorrectly ordered pairs
    Headroom,
}

#[derive(Debug, Args)]
pub struct CrossArgs {
    /// Model [default: first in the schema]
    #[arg(long)]
    pub model: Option<String>,
    /// Feature whose values (or bins) define the partition
    #[arg(long)]
    pub feature: String,
    #[arg(long, value_enum, default_value_t = CrossKind::Mean)]
    pub kind: CrossKind,
    /// Bin edges for a numeric feature, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub bins: Vec<f64>,
    /// Write the matrix as CSV
    #[arg(long, value_name = "FILE")]
    pub csv_out: Option<PathBuf>,
    /// Write the matrix as an SVG heatmap
    #[arg(long, value_name = "FILE")]
    pub svg_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SegmentPairsArgs {
    /// Model [default: first in the schema]
    #[arg(long)]
    pub model: Option<String>,
    /// Pairs to sample: ceil(sqrt(budget)) examples from each class
    #[arg(long, default_value_t = 10_000)]
    pub pair_budget: usize,
    #[command(flatten)]
    pub tree: TreeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Runs the command line `args` (program name first) against the process's
/// standard streams and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Exit statuses: 0 success, 1 usage, 2 data, 3 compute.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match apply_config(args) {
        Ok(a) => a,
        Err(e) => return fail(&e, err),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 1;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match execute(&cli).and_then(|o| o.commit(out)) {
        Ok(()) => 0,
        Err(e) => fail(&e, err),
    }
}

fn fail(e: &AppError, err: &mut dyn Write) -> i32 {
    let class = match e.class() {
        ErrorClass::Usage => "usage",
        ErrorClass::Data => "data",
        ErrorClass::Compute => "compute",
    };
    let _ = writeln!(err, "error [{class}]: {e}");
    e.exit_code()
}

/// Appends the `--config` file's entries as flags, skipping any flag already
/// on the command line. Arrays become comma-separated values, `true` a bare
/// switch.
fn apply_config(mut args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let Some(a) = a.to_str() else { continue };
        if a == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| AppError::io(&path, e))?;
    let bad = |msg: String| AppError::Usage(format!("{}: {msg}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let map = value
        .as_object()
        .ok_or_else(|| bad("config must be a JSON object".into()))?;
    let present: Vec<String> = args
        .iter()
        .filter_map(|a| a.to_str())
        .filter(|a| a.starts_with("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let scalar = |key: &str, v: &serde_json::Value| match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        serde_json::Value::Bool(b) => Ok(b.to_string()),
        _ => Err(bad(format!("unsupported value for `{key}`"))),
    };
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" || present.contains(&flag) {
            continue;
        }
        match v {
            serde_json::Value::Null | serde_json::Value::Bool(false) => {}
            serde_json::Value::Bool(true) => args.push(flag.into()),
            serde_json::Value::Array(items) => {
                let parts = items.iter().map(|x| scalar(key, x)).collect::<Result<Vec<_>>>()?;
                args.push(flag.into());
                args.push(parts.join(",").into());
            }
            other => {
                args.push(flag.into());
                args.push(scalar(key, other)?.into());
            }
        }
    }
    Ok(args)
}

fn execute(cli: &Cli) -> Result<Outputs> {
    let pool = parallel::pool(cli.run.threads.map(NonZeroUsize::get))?;
    pool.install(|| match &cli.command {
        Command::Metrics(a) => metrics_cmd(&cli.run, a),
        Command::Attribute(a) => attribute_cmd(&cli.run, a),
        Command::Segment(a) => segment_cmd(&cli.run, a),
        Command::SegmentDelta(a) => segment_delta_cmd(&cli.run, a),
        Command::Cross(a) => cross_cmd(&cli.run, a),
        Command::SegmentPairs(a) => segment_pairs_cmd(&cli.run, a),
    })
}

fn load(run: &RunArgs) -> Result<EvalDataset> {
    let required =
        |p: &Option<PathBuf>, flag: &str| p.clone().ok_or_else(|| AppError::Usage(format!("{flag} is required")));
    let (data, schema) = (required(&run.data, "--data")?, required(&run.schema, "--schema")?);
    load_dataset(&data, &load_schema(&schema)?)
}

fn model_or_first(data: &EvalDataset, model: &Option<String>) -> Result<String> {
    match model {
        Some(m) => {
            data.schema().model_index(m)?;
            Ok(m.clone())
        }
        None => Ok(data.schema().score_columns[0].model.clone()),
    }
}

fn partition_for(data: &EvalDataset, feature: &str, bins: &[f64]) -> Result<Partition> {
    Ok(if bins.is_empty() {
        Partition::categorical(data, feature)?
    } else {
        Partition::binned(data, feature, bins)?
    })
}

fn emit(outputs: &mut Outputs, output: &OutputArgs, json: Vec<u8>, text: String) {
    let bytes = match output.format {
        Format::Json => json,
        Format::Text => text.into_bytes(),
    };
    match &output.out {
        Some(path) => outputs.file(path, bytes),
        None => outputs.stdout = bytes,
    }
}

fn metrics_cmd(run: &RunArgs, args: &MetricsArgs) -> Result<Outputs> {
    let data = load(run)?;
    let models: Vec<String> = if args.model.is_empty() {
        data.schema().model_names().map(String::from).collect()
    } else {
        args.model.clone()
    };
    let mut rows = Vec::with_capacity(models.len());
    for m in &models {
        rows.push(ModelMetrics {
            model: m.clone(),
            auc: metrics::auc(&data, m)?,
            mean_ce_loss: metrics::ce_loss(&data, m)?.mean(),
            mean_gini: metrics::gini_impurity(&data, m)?.mean(),
        });
    }
    let slices = match &args.slice_by {
        Some(feature) => {
            let partition = partition_for(&data, feature, &args.bins)?;
            let per_model = models
                .iter()
                .map(|m| Ok((m.clone(), metrics::slice_metrics(&data, m, &partition)?)))
                .collect::<Result<Vec<_>>>()?;
            Some(SliceTable::new(feature, per_model))
        }
        None => None,
    };
    let report = MetricsReport {
        command: "metrics",
        records: data.len(),
        positives: data.positives(),
        negatives: data.negatives(),
        models: rows,
        slices,
    };
    let mut outputs = Outputs::default();
    emit(&mut outputs, &args.output, report::to_json(&report), report.text());
    Ok(outputs)
}

fn attribute_cmd(run: &RunArgs, args: &AttributeArgs) -> Result<Outputs> {
    let data = load(run)?;
    let model = model_or_first(&data, &args.model)?;
    let examples = attribution::example_attributions(&data, &model)?;
    let (correlation, correlation_error) = match attribution::attribution_correlation_report(&data, &model) {
        Ok(c) => (Some(c.into()), None),
        Err(e) if e.class() == ErrorClass::Compute => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let mut outputs = Outputs::default();
    outputs.file(&args.out, report::attributions_csv(&examples)?);
    let mut pairs_written = None;
    if let Some(path) = &args.pairs_out {
        let sample = (args.max_pos.is_some() || args.max_neg.is_some()).then(|| PairSample {
            max_pos: args.max_pos.unwrap_or(usize::MAX),
            max_neg: args.max_neg.unwrap_or(usize::MAX),
            seed: derive_seed(run.seed, 1),
        });
        let pairs = parallel::pair_credits(&data, &model, sample)?;
        pairs_written = Some(pairs.len());
        outputs.file(path, report::pairs_csv(&pairs, &data.scores(&model)?)?);
    }
    let u: f64 = examples.iter().map(|e| e.total).sum();
    let summary = AttributeReport {
        command: "attribute",
        auc: metrics::auc(&data, &model)?,
        model: model.clone(),
        records: data.len(),
        positives: data.positives(),
        negatives: data.negatives(),
        u_statistic: metrics::mann_whitney_u(&data.labels(), &data.scores(&model)?)?,
        total_attribution: u,
        correlation,
        correlation_error,
        pairs_written,
    };
    outputs.stdout = match args.format {
        Format::Json => report::to_json(&summary),
        Format::Text => summary.text().into_bytes(),
    };
    Ok(outputs)
}

fn tree_params(tree: &TreeArgs, default_min_leaf: usize) -> TreeParams {
    TreeParams {
        max_depth: tree.max_depth,
        min_leaf_size: tree.min_leaf.unwrap_or(default_min_leaf),
        significance_level: tree.alpha,
        fit_fraction: tree.fit_fraction,
        p_value_method: if tree.exact_p {
            PValueMethod::StudentT
        } else {
            PValueMethod::NormalApprox
        },
    }
}

fn dims(data: &EvalDataset, tree: &TreeArgs) -> Vec<String> {
    match &tree.dims {
        Some(d) => d.iter().filter(|s| !s.is_empty()).cloned().collect(),
        None => data.schema().feature_columns.iter().map(|c| c.name.clone()).collect(),
    }
}

fn segment_outputs(
    command: &'static str,
    seg: &Segmentation,
    dims: &[String],
    seed: u64,
    pair_rows: Option<(usize, Vec<pairs::PairSegmentRow>)>,
    tree: &TreeArgs,
    output: &OutputArgs,
) -> Outputs {
    let report = SegmentReport::new(
        command,
        &seg.tree,
        dims,
        seed,
        seg.fit_rows.len(),
        seg.estimation_rows.len(),
        pair_rows,
    );
    let mut outputs = Outputs::default();
    emit(&mut outputs, output, report::to_json(&report), report.text());
    if let Some(path) = &tree.dot_out {
        outputs.file(path, dot::tree_to_dot(&seg.tree).into_bytes());
    }
    outputs
}

fn pair_segmentation(
    data: &EvalDataset,
    model: &str,
    dims: &[String],
    tree: &TreeArgs,
    budget: usize,
    seed: u64,
) -> Result<(Segmentation, (usize, Vec<pairs::PairSegmentRow>))> {
    let params = tree_params(tree, TreeParams::for_pairs().min_leaf_size);
    let ps = pairs::segment_pairs(data, model, dims, params, budget, seed)?;
    let rows = ps.rows();
    Ok((ps.segmentation, (ps.pairs.len(), rows)))
}

fn segment_cmd(run: &RunArgs, args: &SegmentArgs) -> Result<Outputs> {
    let data = load(run)?;
    let model = model_or_first(&data, &args.model)?;
    let dims = dims(&data, &args.tree);
    let defaults = TreeParams::default().min_leaf_size;
    let (seg, pair_rows) = match &args.target {
        Target::Attribution => (
            segmentation::segment_examples(&data, &model, &dims, tree_params(&args.tree, defaults), run.seed)?,
            None,
        ),
        Target::Delta(b) => (
            segmentation::segment_model_delta(&data, &model, b, &dims, tree_params(&args.tree, defaults), run.seed)?,
            None,
        ),
        Target::Pair => {
            let (seg, rows) = pair_segmentation(&data, &model, &dims, &args.tree, args.pair_budget, run.seed)?;
            (seg, Some(rows))
        }
    };
    Ok(segment_outputs(
        "segment",
        &seg,
        &dims,
        run.seed,
        pair_rows,
        &args.tree,
        &args.output,
    ))
}

fn segment_delta_cmd(run: &RunArgs, args: &SegmentDeltaArgs) -> Result<Outputs> {
    let data = load(run)?;
    let dims = dims(&data, &args.tree);
    let params = tree_params(&args.tree, TreeParams::default().min_leaf_size);
    let seg = segmentation::segment_model_delta(&data, &args.model_a, &args.model_b, &dims, params, run.seed)?;
    Ok(segment_outputs(
        "segment-delta",
        &seg,
        &dims,
        run.seed,
        None,
        &args.tree,
        &args.output,
    ))
}

fn segment_pairs_cmd(run: &RunArgs, args: &SegmentPairsArgs) -> Result<Outputs> {
    let data = load(run)?;
    let model = model_or_first(&data, &args.model)?;
    let dims = dims(&data, &args.tree);
    let (seg, rows) = pair_segmentation(&data, &model, &dims, &args.tree, args.pair_budget, run.seed)?;
    Ok(segment_outputs(
        "segment-pairs",
        &seg,
        &dims,
        run.seed,
        Some(rows),
        &args.tree,
        &args.output,
    ))
}

fn cross_cmd(run: &RunArgs, args: &CrossArgs) -> Result<Outputs> {
    let data = load(run)?;
    let model = model_or_first(&data, &args.model)?;
    let partition = partition_for(&data, &args.feature, &args.bins)?;
    let statistic = match args.kind {
        CrossKind::Mean => CrossStatistic::MeanPairAttribution,
        CrossKind::Headroom => CrossStatistic::IncorrectPairCount,
    };
    let matrix = parallel::cross_matrix(&data, &model, &partition, statistic)?;
    let report = CrossReport::new(&model, &matrix, metrics::auc(&data, &model)?);
    let mut outputs = Outputs::default();
    emit(&mut outputs, &args.output, report::to_json(&report), report.text());
    if let Some(path) = &args.csv_out {
        outputs.file(path, report.csv()?);
    }
    if let Some(path) = &args.svg_out {
        outputs.file(path, svg::heatmap(&report).into_bytes());
    }
    Ok(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets() {
        assert_eq!(parse_target("attribution"), Ok(Target::Attribution));
        assert_eq!(parse_target("pair"), Ok(Target::Pair));
        assert_eq!(parse_target("delta:b"), Ok(Target::Delta("b".into())));
        assert!(parse_target("delta:").is_err());
        assert!(parse_target("pairs").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
