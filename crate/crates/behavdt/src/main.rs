//! Command-line front end: dataset generation and discretization, training,
//! prediction, evaluation, and the sweep/compare experiment drivers.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data or model errors.
//! Set `BEHAVDT_LOG=debug` (or `info`) for diagnostics on stderr.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufReader, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use behavdt::dataset::{
    discretize, generate_synthetic, load_csv, load_raw_log, write_csv, ContextSchema,
    DiscretizationConfig, PlantedTreeSpec, TimeBin, MISSING,
};
use behavdt::evaluation::{
    compare_doc, compare_models, compare_tsv, confidence_sweep, cross_validate, metrics_doc,
    metrics_tsv, sweep_doc, sweep_tsv, train_model, ModelKind,
};
use behavdt::learner::{ExceptionPolicy, LearnerConfig};
use behavdt::model::{
    count_decision_nodes, deserialize, export_dot, export_rules, predict, serialize, TrainedModel,
};
use behavdt::{Error, Result};

#[derive(Parser)]
#[command(
    name = "behavdt",
    version,
    about = "Behavior-centric decision trees over categorical context data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset from a planted-rule specification
    Gen(GenArgs),
    /// Turn a raw interaction log into a categorical dataset
    Discretize(DiscretizeArgs),
    /// Train a model and write its document
    Train(TrainArgs),
    /// Predict a label for every row of a dataset
    Predict(PredictArgs),
    /// Cross-validate one model and report metrics
    Evaluate(EvaluateArgs),
    /// Cross-validate across a grid of confidence thresholds
    Sweep(SweepArgs),
    /// Compare zero-r, traditional-dt, and behavdt on identical folds
    Compare(CompareArgs),
    /// Render a stored model as DOT or as decision rules
    Export(ExportArgs),
}

/// Accepts a fraction in [0, 1] or a percentage in (1, 100].
fn parse_threshold(text: &str) -> std::result::Result<f64, String> {
    let value: f64 = text
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    if !value.is_finite() || !(0.0..=100.0).contains(&value) {
        return Err("expected a fraction in [0, 1] or a percentage in (1, 100]".into());
    }
    Ok(if value > 1.0 { value / 100.0 } else { value })
}

fn parse_model_kind(text: &str) -> std::result::Result<ModelKind, String> {
    match text {
        "dt" => return Ok(ModelKind::TraditionalDt),
        "zeror" => return Ok(ModelKind::ZeroR),
        _ => {}
    }
    ModelKind::parse(text).ok_or_else(|| {
        "expected `behavdt`, `dt` (alias `traditional-dt`), or `zeror` (alias `zero-r`)".into()
    })
}

fn parse_baseline(text: &str) -> std::result::Result<ModelKind, String> {
    match text {
        "dt" | "traditional-dt" => Ok(ModelKind::TraditionalDt),
        "zeror" | "zero-r" => Ok(ModelKind::ZeroR),
        _ => Err("expected `dt` or `zeror`".into()),
    }
}

fn parse_policy(text: &str) -> std::result::Result<ExceptionPolicy, String> {
    ExceptionPolicy::parse(text)
        .ok_or_else(|| "expected `majority` (majority-deviation) or `any` (any-deviation)".into())
}

#[derive(Args)]
struct GenArgs {
    /// Planted-rule specification (TOML)
    #[arg(long)]
    spec: PathBuf,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Override the seed stored in the specification
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DiscretizeArgs {
    /// Raw log CSV (timestamp,contact_id,location,label)
    #[arg(long)]
    input: PathBuf,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Discretization settings (TOML); built-in defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Prefix time segments with the weekday (overrides the config file)
    #[arg(long)]
    include_weekday: bool,
    /// Minutes to add to timestamps before binning (overrides the config file)
    #[arg(long)]
    utc_offset_minutes: Option<i32>,
}

#[derive(Args)]
struct TrainArgs {
    /// Training data CSV
    #[arg(long)]
    data: PathBuf,
    /// Output model document path
    #[arg(long)]
    model: PathBuf,
    /// Train a baseline (`dt` or `zeror`) instead of the behavior-centric tree
    #[arg(long, value_parser = parse_baseline)]
    baseline: Option<ModelKind>,
    /// Confidence threshold (fraction or percentage)
    #[arg(long, default_value = "0.8", value_parser = parse_threshold)]
    threshold: f64,
    /// When a generalized node expands an exception branch
    #[arg(long, default_value = "majority-deviation", value_parser = parse_policy)]
    policy: ExceptionPolicy,
    /// Depth cap for the tree
    #[arg(long)]
    max_depth: Option<usize>,
}

#[derive(Args)]
struct PredictArgs {
    /// Model document
    #[arg(long)]
    model: PathBuf,
    /// Instances to predict; the class column is optional
    #[arg(long)]
    data: PathBuf,
    /// Output TSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Dataset CSV
    #[arg(long)]
    data: PathBuf,
    /// Model to evaluate (`behavdt`, `dt`, or `zeror`)
    #[arg(long = "model-kind", default_value = "behavdt", value_parser = parse_model_kind)]
    model_kind: ModelKind,
    #[arg(long, default_value = "0.8", value_parser = parse_threshold)]
    threshold: f64,
    #[arg(long, default_value = "majority-deviation", value_parser = parse_policy)]
    policy: ExceptionPolicy,
    #[arg(long)]
    max_depth: Option<usize>,
    /// Number of folds
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    k: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Deal folds per class instead of purely at random
    #[arg(long)]
    stratified: bool,
    /// Output TSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the full-precision TOML report here
    #[arg(long)]
    doc: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Dataset CSV
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated thresholds (fractions or percentages)
    #[arg(
        long,
        value_delimiter = ',',
        value_parser = parse_threshold,
        default_values_t = [1.0, 0.9, 0.8, 0.7, 0.6]
    )]
    thresholds: Vec<f64>,
    #[arg(long, default_value = "majority-deviation", value_parser = parse_policy)]
    policy: ExceptionPolicy,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    k: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    stratified: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    doc: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Dataset CSV
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "0.8", value_parser = parse_threshold)]
    threshold: f64,
    #[arg(long, default_value = "majority-deviation", value_parser = parse_policy)]
    policy: ExceptionPolicy,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    k: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    stratified: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    doc: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Rules,
}

#[derive(Args)]
struct ExportArgs {
    /// Model document
    #[arg(long)]
    model: PathBuf,
    /// Rendering to produce
    #[arg(long, value_enum)]
    format: ExportFormat,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("BEHAVDT_LOG", "off"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Discretize(args) => cmd_discretize(args),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Export(args) => cmd_export(args),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Writes through a temp file in the target directory so the destination is
/// never left half-written.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let wrap = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source: e,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    tmp.write_all(bytes).map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, content.as_bytes()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_model(path: &Path) -> Result<TrainedModel> {
    deserialize(&read_text(path)?)
}

fn learner_config(threshold: f64, policy: ExceptionPolicy, max_depth: Option<usize>) -> LearnerConfig {
    LearnerConfig {
        confidence_threshold: threshold,
        exception_policy: policy,
        max_depth,
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let mut spec = PlantedTreeSpec::from_toml_str(&read_text(&args.spec)?)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let dataset = generate_synthetic(&spec)?;
    let mut buf = Vec::new();
    write_csv(&dataset, &mut buf)?;
    write_atomic(&args.out, &buf)?;
    log::info!(
        "generated {} instances into {}",
        dataset.len(),
        args.out.display()
    );
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscretizeDoc {
    #[serde(rename = "bin", default)]
    bins: Vec<BinDoc>,
    #[serde(default)]
    include_weekday: bool,
    default_relationship: Option<String>,
    #[serde(default)]
    utc_offset_minutes: i32,
    #[serde(default)]
    contacts: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BinDoc {
    label: String,
    start_minute: u16,
}

fn default_time_bins() -> Vec<TimeBin> {
    vec![
        TimeBin::new("Night", 0),
        TimeBin::new("Morning", 360),
        TimeBin::new("Afternoon", 720),
        TimeBin::new("Evening", 1080),
    ]
}

fn cmd_discretize(args: DiscretizeArgs) -> Result<()> {
    let mut config = match &args.config {
        None => DiscretizationConfig::new(
            default_time_bins(),
            false,
            BTreeMap::new(),
            "unknown",
            0,
        )?,
        Some(path) => {
            let doc: DiscretizeDoc = toml::from_str(&read_text(path)?)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let bins = if doc.bins.is_empty() {
                default_time_bins()
            } else {
                doc.bins
                    .into_iter()
                    .map(|b| TimeBin::new(b.label, b.start_minute))
                    .collect()
            };
            DiscretizationConfig::new(
                bins,
                doc.include_weekday,
                doc.contacts,
                doc.default_relationship.unwrap_or_else(|| "unknown".into()),
                doc.utc_offset_minutes,
            )?
        }
    };
    if args.include_weekday {
        config.include_weekday = true;
    }
    if let Some(offset) = args.utc_offset_minutes {
        config.utc_offset_minutes = offset;
    }
    let rows = load_raw_log(&args.input)?;
    let dataset = discretize(&rows, &config)?;
    let mut buf = Vec::new();
    write_csv(&dataset, &mut buf)?;
    write_atomic(&args.out, &buf)?;
    log::info!(
        "discretized {} rows into {}",
        dataset.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let dataset = load_csv(&args.data, None)?;
    let kind = args.baseline.unwrap_or(ModelKind::BehavDt);
    let config = learner_config(args.threshold, args.policy, args.max_depth);
    let model = train_model(kind, &dataset, &config)?;
    write_atomic(&args.model, serialize(&model).as_bytes())?;
    log::info!(
        "trained {} on {} instances: {} decision nodes",
        model.kind_token(),
        dataset.len(),
        count_decision_nodes(&model)
    );
    Ok(())
}

/// Context rows to predict, plus their truth labels when the file had them.
type PredictionRows = (Vec<Vec<String>>, Option<Vec<String>>);

/// Reads instances for prediction. When the header carries the model's class
/// column the truth labels come along; otherwise the header must list
/// exactly the schema's context attributes, in order.
fn load_prediction_rows(path: &Path, schema: &ContextSchema) -> Result<PredictionRows> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: display.clone(),
        source: e,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(BufReader::new(file));
    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| Error::Csv {
            path: display.clone(),
            source: e,
        })?,
        None => return Err(Error::EmptyFile { path: display }),
    };
    let header: Vec<String> = header.iter().map(str::to_owned).collect();

    if header.contains(&schema.class_attribute) {
        let dataset = load_csv(path, Some(schema))?;
        let mut rows = Vec::with_capacity(dataset.len());
        let mut truths = Vec::with_capacity(dataset.len());
        for instance in dataset.instances {
            rows.push(instance.values);
            truths.push(instance.label);
        }
        return Ok((rows, Some(truths)));
    }

    let expected: Vec<&str> = schema.attributes.iter().map(|a| a.name.as_str()).collect();
    if header != expected {
        return Err(Error::Schema(format!(
            "header [{}] does not match the model's context attributes [{}]",
            header.join(", "),
            expected.join(", ")
        )));
    }
    let mut rows = Vec::new();
    for (idx, rec) in records.enumerate() {
        let rec = rec.map_err(|e| Error::Csv {
            path: display.clone(),
            source: e,
        })?;
        if rec.len() != header.len() {
            return Err(Error::RowArity {
                row: idx as u64 + 1,
                expected: header.len(),
                found: rec.len(),
            });
        }
        rows.push(
            rec.iter()
                .map(|cell| if cell.is_empty() { MISSING } else { cell }.to_owned())
                .collect(),
        );
    }
    Ok((rows, None))
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let (rows, truths) = load_prediction_rows(&args.data, model.schema())?;
    let mut out = String::from("index\tlabel\tsource_node\tdepth\tfallback_used\ttruth\n");
    for (i, values) in rows.iter().enumerate() {
        let p = predict(&model, values)?;
        let source = p
            .source_node
            .map(|id| id.to_string())
            .unwrap_or_else(|| "-".into());
        let truth = truths.as_ref().map_or("-", |t| t[i].as_str());
        let _ = writeln!(
            out,
            "{i}\t{}\t{source}\t{}\t{}\t{truth}",
            p.label, p.depth, p.fallback_used
        );
    }
    emit(args.out.as_deref(), &out)
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let dataset = load_csv(&args.data, None)?;
    let config = learner_config(args.threshold, args.policy, args.max_depth);
    let report = cross_validate(
        &dataset,
        args.model_kind,
        &config,
        args.k as usize,
        args.seed,
        args.stratified,
    )?;
    emit(args.out.as_deref(), &metrics_tsv(&report))?;
    if let Some(doc) = &args.doc {
        write_atomic(doc, metrics_doc(&report).as_bytes())?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let dataset = load_csv(&args.data, None)?;
    let config = learner_config(0.8, args.policy, args.max_depth);
    let result = confidence_sweep(
        &dataset,
        &config,
        &args.thresholds,
        args.k as usize,
        args.seed,
        args.stratified,
    )?;
    emit(args.out.as_deref(), &sweep_tsv(&result))?;
    if let Some(doc) = &args.doc {
        write_atomic(doc, sweep_doc(&result).as_bytes())?;
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let dataset = load_csv(&args.data, None)?;
    let config = learner_config(args.threshold, args.policy, args.max_depth);
    let rows = compare_models(
        &dataset,
        &config,
        args.k as usize,
        args.seed,
        args.stratified,
    )?;
    emit(args.out.as_deref(), &compare_tsv(&rows))?;
    if let Some(doc) = &args.doc {
        write_atomic(doc, compare_doc(&rows).as_bytes())?;
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let content = match args.format {
        ExportFormat::Dot => export_dot(&model),
        ExportFormat::Rules => export_rules(&model),
    };
    emit(args.out.as_deref(), &content)
}
