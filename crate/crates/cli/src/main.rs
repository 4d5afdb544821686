//! Command-line front end: information measures over tabular data, lattice
//! transforms, the identity verification report, predictor search, and
//! hypercube decomposition enumeration.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 I/O error,
//! 3 strict-verification failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use mobius_lattice::claims::{run_report, strict_violations, ReportInputs};
use mobius_lattice::decompose::{
    axis_split_recurrence_count, decomposition_count_formula, enumerate_cube_splits,
    fixed_split_recurrence_count, split_residual, DecompositionSpec,
};
use mobius_lattice::distribution::JointDistribution;
use mobius_lattice::function::{LatticeFunction, LogBase, SignConvention, DEFAULT_N_CAP};
use mobius_lattice::ingest::{
    encode, read_table, BinStrategy, Dataset, EncodeOptions, IngestError, TableFormat,
};
use mobius_lattice::measures::{
    differential_entropy, entropy_lattice_capped, symmetric_delta, SymmetricDeltaMode,
};
use mobius_lattice::operators::{MobiusOperator, OperatorKind};
use mobius_lattice::predict::{predict, PredictOptions};
use mobius_lattice::transform::{fast_signed_transform, Direction};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

/// Environment variable overriding the default lattice width cap.
const N_CAP_ENV: &str = "MOBIUS_LATTICE_N_CAP";

#[derive(Debug)]
enum AppError {
    Usage(String),
    Io(String),
    Strict(Vec<String>),
}

impl AppError {
    fn code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Io(_) => 2,
            AppError::Strict(_) => 3,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> AppError {
    AppError::Usage(e.to_string())
}

fn parse_convention(s: &str) -> Result<SignConvention, String> {
    SignConvention::from_str(s)
}

fn parse_log_base(s: &str) -> Result<LogBase, String> {
    LogBase::from_str(s)
}

#[derive(Parser)]
#[command(
    name = "mobius-lattice",
    version,
    about = "Signed subset-lattice transforms, multivariate information measures, and a mechanical identity verifier"
)]
struct Cli {
    /// Logarithm base for entropy-valued output: `e` (nats) or `2` (bits).
    #[arg(long, global = true, value_parser = parse_log_base, default_value = "e")]
    log_base: LogBase,

    /// Sign convention for the down/up transforms.
    #[arg(long, global = true, value_parser = parse_convention, default_value = "size-parity")]
    convention: SignConvention,

    /// Lattice width cap; defaults to 24, or the MOBIUS_LATTICE_N_CAP
    /// environment variable when set.
    #[arg(long, global = true)]
    n_cap: Option<usize>,

    /// Seed for seeded operations (holdout splits, verification sampling).
    #[arg(long, global = true, default_value_t = 11)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an information measure over columns of a CSV/TSV table.
    Measures(MeasuresArgs),
    /// Apply a lattice operator to a lattice-function JSON file.
    Transform(TransformArgs),
    /// Evaluate every registered identity and write the verification report.
    Verify(VerifyArgs),
    /// Search for the conditioning subset that best predicts a target column.
    Predict(PredictArgs),
    /// Enumerate axis splits of the hypercube convolution and their counts.
    Decompose(DecomposeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MeasureKind {
    Entropy,
    Interaction,
    Delta,
    SymmetricDelta,
    MultiInfo,
    Cll,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    EqualFrequency,
    EqualWidth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DeltaSignArg {
    Product,
    NegatedProduct,
}

/// Flags shared by the subcommands that read tabular data.
#[derive(Args)]
struct IngestArgs {
    /// Treat the input as tab-separated regardless of extension.
    #[arg(long)]
    tsv: bool,

    /// Bin count for numeric columns.
    #[arg(long, default_value_t = 4)]
    bins: usize,

    /// Discretization strategy for numeric columns.
    #[arg(long, value_enum, default_value_t = StrategyArg::EqualFrequency)]
    strategy: StrategyArg,

    /// Missing-value sentinel (repeatable); empty cells always count.
    #[arg(long = "na")]
    na: Vec<String>,
}

#[derive(Args)]
struct MeasuresArgs {
    /// Input table.
    #[arg(long)]
    input: PathBuf,

    /// Comma-separated column names to use, in lattice order (default: all).
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,

    /// Which measure to compute.
    #[arg(long, value_enum)]
    measure: MeasureKind,

    /// Target variable, required for `cll`.
    #[arg(long)]
    target: Option<String>,

    /// Sign mode for `symmetric-delta`.
    #[arg(long, value_enum, default_value_t = DeltaSignArg::Product)]
    delta_sign: DeltaSignArg,

    /// Output format; `csv` is available for lattice-valued measures.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    #[command(flatten)]
    ingest: IngestArgs,

    /// Output file.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct TransformArgs {
    /// Input lattice-function JSON file.
    #[arg(long)]
    input: PathBuf,

    /// Operator to apply: `I`, `m`, `M`, `X`, `P`, `R`, or `F:<reference mask>`.
    #[arg(long)]
    op: String,

    /// Output file.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Smallest lattice width to evaluate.
    #[arg(long, default_value_t = 2)]
    n_min: usize,

    /// Largest lattice width to evaluate.
    #[arg(long, default_value_t = 4)]
    n_max: usize,

    /// Comma-separated seeds; defaults to the global seed.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,

    /// Exit with status 3 if any claim misses its committed status.
    #[arg(long)]
    strict: bool,

    /// Output report file.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Input table.
    #[arg(long)]
    input: PathBuf,

    /// Column to predict.
    #[arg(long)]
    target: String,

    /// Largest conditioning-subset size to consider.
    #[arg(long, default_value_t = 2)]
    max_degree: usize,

    /// Fraction of rows held out for scoring, in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    holdout: f64,

    #[command(flatten)]
    ingest: IngestArgs,

    /// Output report file.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Hypercube dimension, 2 to 5.
    #[arg(long)]
    n: usize,

    /// Numerically check every face expression on seeded random functions.
    #[arg(long)]
    verify: bool,

    /// Output file.
    #[arg(long)]
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                AppError::Usage(msg) => eprintln!("error: {msg}"),
                AppError::Io(msg) => eprintln!("I/O error: {msg}"),
                AppError::Strict(violations) => {
                    eprintln!("strict verification failed:");
                    for v in violations {
                        eprintln!("  - {v}");
                    }
                }
            }
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    let n_cap = resolve_n_cap(cli.n_cap)?;
    match &cli.command {
        Command::Measures(args) => cmd_measures(&cli, args, n_cap),
        Command::Transform(args) => cmd_transform(&cli, args, n_cap),
        Command::Verify(args) => cmd_verify(&cli, args),
        Command::Predict(args) => cmd_predict(&cli, args),
        Command::Decompose(args) => cmd_decompose(&cli, args),
    }
}

fn resolve_n_cap(flag: Option<usize>) -> Result<usize, AppError> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(N_CAP_ENV) {
        Ok(text) => text
            .parse::<usize>()
            .map_err(|_| usage(format!("{N_CAP_ENV}=`{text}` is not a valid width cap"))),
        Err(_) => Ok(DEFAULT_N_CAP),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), AppError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| AppError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| AppError::Io(format!("cannot write `{}`: {e}", path.display())))
}

fn table_format(path: &Path, force_tsv: bool) -> TableFormat {
    if force_tsv || path.extension().is_some_and(|e| e == "tsv") {
        TableFormat::Tsv
    } else {
        TableFormat::Csv
    }
}

fn load_dataset(input: &Path, ingest: &IngestArgs) -> Result<Dataset, AppError> {
    let raw = read_table(input, table_format(input, ingest.tsv)).map_err(|e| match e {
        IngestError::Io { .. } => AppError::Io(e.to_string()),
        other => usage(other),
    })?;
    let options = EncodeOptions {
        bins: ingest.bins,
        strategy: match ingest.strategy {
            StrategyArg::EqualFrequency => BinStrategy::EqualFrequency,
            StrategyArg::EqualWidth => BinStrategy::EqualWidth,
        },
        na_sentinels: ingest.na.clone(),
    };
    encode(&raw, &options).map_err(usage)
}

fn selected_columns(data: &Dataset, vars: &[String]) -> Result<Vec<usize>, AppError> {
    if vars.is_empty() {
        return Ok((0..data.names.len()).collect());
    }
    vars.iter()
        .map(|name| {
            data.column_index(name)
                .ok_or_else(|| usage(format!("column `{name}` not found in the input")))
        })
        .collect()
}

#[derive(Serialize)]
struct SymmetricDeltaOutput {
    measure: &'static str,
    mode: &'static str,
    log_base: LogBase,
    variables: Vec<String>,
    deltas: Vec<f64>,
    value: f64,
}

fn subset_label(f: &LatticeFunction, mask: u32) -> String {
    let names: Vec<String> = (0..f.n)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| match &f.labels {
            Some(labels) => labels[i].clone(),
            None => format!("X{}", i + 1),
        })
        .collect();
    format!("{{{}}}", names.join(","))
}

fn write_lattice_csv(path: &Path, f: &LatticeFunction) -> Result<(), AppError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| AppError::Io(format!("cannot write `{}`: {e}", path.display())))?;
    writer
        .write_record(["subset_label", "mask", "value"])
        .map_err(|e| AppError::Io(e.to_string()))?;
    for mask in 0..f.len() as u32 {
        writer
            .write_record([
                subset_label(f, mask),
                mask.to_string(),
                f.value(mask).to_string(),
            ])
            .map_err(|e| AppError::Io(e.to_string()))?;
    }
    writer.flush().map_err(|e| AppError::Io(e.to_string()))
}

fn cmd_measures(cli: &Cli, args: &MeasuresArgs, n_cap: usize) -> Result<(), AppError> {
    let data = load_dataset(&args.input, &args.ingest)?;
    let cols = selected_columns(&data, &args.vars)?;
    if cols.len() > n_cap {
        return Err(usage(format!(
            "{} variables exceed the lattice width cap of {n_cap}",
            cols.len()
        )));
    }
    let dist: JointDistribution = data.joint_distribution(&cols).map_err(usage)?;
    let h = entropy_lattice_capped(&dist, cli.log_base, n_cap).map_err(usage)?;

    let lattice = match args.measure {
        MeasureKind::Entropy => Some(h.clone()),
        MeasureKind::Interaction => {
            let mut g = fast_signed_transform(&h, Direction::Down, cli.convention);
            g.role = "interaction".into();
            Some(g)
        }
        MeasureKind::Delta => {
            let mut d = fast_signed_transform(&h, Direction::Up, cli.convention);
            d.role = "delta".into();
            Some(d)
        }
        MeasureKind::MultiInfo => Some(mobius_lattice::measures::multi_information(&h)),
        MeasureKind::Cll => {
            let target = args
                .target
                .as_deref()
                .ok_or_else(|| usage("--target is required for the cll measure"))?;
            let x = dist
                .names()
                .iter()
                .position(|n| n == target)
                .ok_or_else(|| usage(format!("target `{target}` is not a selected column")))?;
            Some(differential_entropy(&h, x).map_err(usage)?)
        }
        MeasureKind::SymmetricDelta => None,
    };

    match lattice {
        Some(f) => match args.format {
            OutputFormat::Json => write_json(&args.output, &f),
            OutputFormat::Csv => write_lattice_csv(&args.output, &f),
        },
        None => {
            if args.format == OutputFormat::Csv {
                return Err(usage("symmetric-delta output is JSON only"));
            }
            let mode = match args.delta_sign {
                DeltaSignArg::Product => SymmetricDeltaMode::Product,
                DeltaSignArg::NegatedProduct => SymmetricDeltaMode::NegatedProduct,
            };
            let up = fast_signed_transform(&h, Direction::Up, SignConvention::SizeParity);
            let deltas: Vec<f64> = (0..h.n).map(|x| up.value(1 << x)).collect();
            let value = symmetric_delta(&h, mode).map_err(usage)?;
            write_json(
                &args.output,
                &SymmetricDeltaOutput {
                    measure: "symmetric-delta",
                    mode: match mode {
                        SymmetricDeltaMode::Product => "product",
                        SymmetricDeltaMode::NegatedProduct => "negated-product",
                    },
                    log_base: cli.log_base,
                    variables: dist.names().to_vec(),
                    deltas,
                    value,
                },
            )
        }
    }
}

fn cmd_transform(cli: &Cli, args: &TransformArgs, n_cap: usize) -> Result<(), AppError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| AppError::Io(format!("cannot read `{}`: {e}", args.input.display())))?;
    let f = LatticeFunction::from_json_str_with_cap(&text, n_cap).map_err(usage)?;
    let kind = OperatorKind::from_str(&args.op).map_err(usage)?;
    let op = MobiusOperator::with_convention(kind, cli.convention);
    let result = op.apply(&f).map_err(usage)?;
    write_json(&args.output, &result)
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<(), AppError> {
    if args.n_min < 1 || args.n_max < args.n_min {
        return Err(usage(format!(
            "invalid width range {}..={}",
            args.n_min, args.n_max
        )));
    }
    let seeds = if args.seeds.is_empty() {
        vec![cli.seed]
    } else {
        args.seeds.clone()
    };
    let inputs = ReportInputs {
        n_min: args.n_min,
        n_max: args.n_max,
        seeds,
    };
    let report = run_report(&inputs).map_err(usage)?;
    write_json(&args.output, &report)?;
    if args.strict {
        let violations = strict_violations(&report);
        if !violations.is_empty() {
            return Err(AppError::Strict(violations));
        }
    }
    Ok(())
}

fn cmd_predict(cli: &Cli, args: &PredictArgs) -> Result<(), AppError> {
    let data = load_dataset(&args.input, &args.ingest)?;
    let report = predict(
        &data,
        &args.target,
        &PredictOptions {
            max_degree: args.max_degree,
            holdout_fraction: args.holdout,
            seed: cli.seed,
            base: cli.log_base,
        },
    )
    .map_err(usage)?;
    write_json(&args.output, &report)
}

#[derive(Serialize)]
struct DecomposeOutput {
    n: usize,
    axis_split_count: usize,
    /// Closed-form count of recursive decompositions.
    closed_form_count: u64,
    /// Recurrence with a fixed three-way split at every level; equals the
    /// closed form.
    fixed_split_recurrence: u64,
    /// Recurrence with one split per axis of each sub-cube.
    axis_split_recurrence: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    anomaly: Option<String>,
    splits: Vec<DecompositionSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<DecomposeVerification>,
}

#[derive(Serialize)]
struct DecomposeVerification {
    functions: usize,
    seed: u64,
    max_residual: f64,
    tolerance: f64,
    convention: SignConvention,
}

fn cmd_decompose(cli: &Cli, args: &DecomposeArgs) -> Result<(), AppError> {
    if !(2..=5).contains(&args.n) {
        return Err(usage(format!("--n must be between 2 and 5, got {}", args.n)));
    }
    let splits = enumerate_cube_splits(args.n).map_err(usage)?;
    let closed = decomposition_count_formula(args.n).map_err(usage)?;
    let fixed = fixed_split_recurrence_count(args.n).map_err(usage)?;
    let axis = axis_split_recurrence_count(args.n).map_err(usage)?;
    let anomaly = (fixed != axis).then(|| {
        format!(
            "the fixed three-way recurrence counts {fixed} decompositions but the {n}-cube has {n} axes, giving {axis} under per-axis branching",
            n = args.n
        )
    });
    let verification = if args.verify {
        let mut max_residual = 0.0f64;
        let functions = 50;
        for k in 0..functions {
            let f = LatticeFunction::random(args.n, cli.seed.wrapping_add(k)).map_err(usage)?;
            for spec in &splits {
                max_residual = max_residual.max(split_residual(&f, spec).map_err(usage)?);
            }
        }
        Some(DecomposeVerification {
            functions: functions as usize,
            seed: cli.seed,
            max_residual,
            tolerance: 1e-12,
            convention: SignConvention::CodimParity,
        })
    } else {
        None
    };
    write_json(
        &args.output,
        &DecomposeOutput {
            n: args.n,
            axis_split_count: splits.len(),
            closed_form_count: u64::try_from(closed).unwrap_or(u64::MAX),
            fixed_split_recurrence: u64::try_from(fixed).unwrap_or(u64::MAX),
            axis_split_recurrence: u64::try_from(axis).unwrap_or(u64::MAX),
            anomaly,
            splits,
            verification,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn n_cap_resolution_order() {
        assert_eq!(resolve_n_cap(Some(10)).unwrap(), 10);
    }

    #[test]
    fn format_inference() {
        assert_eq!(
            table_format(Path::new("x.tsv"), false),
            TableFormat::Tsv
        );
        assert_eq!(table_format(Path::new("x.csv"), false), TableFormat::Csv);
        assert_eq!(table_format(Path::new("x.csv"), true), TableFormat::Tsv);
    }
}
