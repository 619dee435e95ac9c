//! `varid`: train, apply, evaluate and tune variety-identification ensembles.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use varid_core::Preset;

use crate::config::{parse_c_values, parse_specs, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(varid_core::Error),
}

impl From<varid_core::Error> for CliError {
    fn from(e: varid_core::Error) -> Self {
        CliError::Data(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(e) if e.is_internal() => 3,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Data(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "varid",
    version,
    about = "Language variety identification with SVM ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train an ensemble and write a model file.
    Train(TrainArgs),
    /// Predict one label per input line.
    Predict(PredictArgs),
    /// Score a model on a labeled test set.
    Evaluate(EvaluateArgs),
    /// Search C and member combinations on a development set.
    GridSearch(GridArgs),
    /// Score every feature family as a single-member model.
    Sweep(SweepArgs),
    /// Print TF-IDF vectors as `index:weight` pairs.
    Featurize(FeaturizeArgs),
    /// Write a synthetic labeled corpus.
    Synth(SynthArgs),
}

/// Member and solver settings shared by every training command.
#[derive(Debug, Args)]
struct ModelOpts {
    /// `key = value` configuration file; flags override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Preset>,
    /// Comma-separated feature specs, e.g. `char:3,char:4,word:3`.
    #[arg(long, value_name = "SPEC,...", value_parser = parse_specs_arg)]
    features: Option<Vec<FeatureSpecList>>,
    /// Regularization parameter.
    #[arg(long = "c", value_name = "REAL", allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, value_name = "REAL")]
    tolerance: Option<f64>,
    #[arg(long, value_name = "N")]
    max_epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Count only pairs with exactly k skipped tokens for `skip:k` features.
    #[arg(long)]
    skip_exact: bool,
}

#[derive(Debug, Clone)]
struct FeatureSpecList(Vec<varid_core::FeatureSpec>);

fn parse_specs_arg(s: &str) -> Result<FeatureSpecList, String> {
    parse_specs(s).map(FeatureSpecList)
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: varid_core::Error| e.to_string())
}

fn parse_c_list(s: &str) -> Result<CValues, String> {
    parse_c_values(s).map(CValues)
}

#[derive(Debug, Clone)]
struct CValues(Vec<f64>);

impl ModelOpts {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            preset: self.preset,
            features: self
                .features
                .as_ref()
                .map(|lists| lists.iter().flat_map(|l| l.0.iter().copied()).collect()),
            c: self.c,
            tolerance: self.tolerance,
            max_epochs: self.max_epochs,
            seed: self.seed,
            skip_exact: self.skip_exact,
            ..RunConfig::default()
        };
        Ok(base.overlay(flags))
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Training TSV (`text<TAB>label`).
    #[arg(long, value_name = "FILE")]
    train: PathBuf,
    /// Output model file.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    #[command(flatten)]
    opts: ModelOpts,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Plain text (one document per line) or TSV whose first field is the text.
    #[arg(long, visible_alias = "test", value_name = "FILE")]
    input: PathBuf,
    /// Defaults to standard output.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    #[arg(long, value_name = "FILE")]
    test: PathBuf,
    /// Directory for scores.tsv, confusion.csv and confusion_normalized.csv.
    #[arg(long, value_name = "DIR")]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, value_name = "FILE")]
    train: PathBuf,
    #[arg(long, value_name = "FILE")]
    dev: PathBuf,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_name = "REAL,...", value_parser = parse_c_list)]
    c_values: Option<CValues>,
    /// One candidate member combination; repeat for more.
    #[arg(long, value_name = "SPEC,...", value_parser = parse_specs_arg)]
    combination: Vec<FeatureSpecList>,
    /// Directory receiving trace.tsv; without it the trace goes to stdout.
    #[arg(long, value_name = "DIR")]
    report: Option<PathBuf>,
    #[command(flatten)]
    opts: ModelOpts,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_name = "FILE")]
    train: PathBuf,
    #[arg(long, value_name = "FILE")]
    dev: PathBuf,
    #[command(flatten)]
    opts: ModelOpts,
}

#[derive(Debug, Args)]
struct FeaturizeArgs {
    /// A single feature spec.
    #[arg(long, value_name = "SPEC")]
    features: String,
    /// Documents to vectorize, one per line.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Corpus to fit the vocabulary on; defaults to the input itself.
    #[arg(long, value_name = "FILE")]
    train: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    #[arg(long)]
    skip_exact: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Comma-separated labels.
    #[arg(long, value_delimiter = ',', required = true)]
    labels: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Probability of a marker word coming from a random label.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

fn one_line(rendered: &str) -> String {
    rendered
        .lines()
        .take_while(|l| !l.trim().is_empty())
        .map(str::trim)
        .collect::<Vec<_>>()
        .join(" ")
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(a) => commands::train(&a.train, &a.model, &a.opts.resolve()?),
        Command::Predict(a) => commands::predict(&a.model, &a.input, a.output.as_deref()),
        Command::Evaluate(a) => commands::evaluate(&a.model, &a.test, a.report.as_deref()),
        Command::GridSearch(a) => {
            let mut cfg = a.opts.resolve()?;
            if let Some(c) = a.c_values {
                cfg.c_values = Some(c.0);
            }
            if !a.combination.is_empty() {
                cfg.combinations = a.combination.into_iter().map(|l| l.0).collect();
            }
            commands::grid_search(&a.train, &a.dev, &cfg, a.report.as_deref())
        }
        Command::Sweep(a) => commands::sweep(&a.train, &a.dev, &a.opts.resolve()?),
        Command::Featurize(a) => commands::featurize(
            &a.features,
            a.skip_exact,
            &a.input,
            a.train.as_deref(),
            a.output.as_deref(),
        ),
        Command::Synth(a) => commands::synth(&a.labels, a.n, a.seed, a.noise, a.output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", one_line(&e.render().to_string()));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("varid: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
