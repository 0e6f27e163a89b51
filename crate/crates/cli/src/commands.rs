//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use eviohmm::effectiveness::sliding_effectiveness_with;
use eviohmm::{NormalizationRule, PredictionPath};

use crate::demo;
use crate::error::{CliError, Result};
use crate::generate::{generate, GenerateOptions, Scenario};
use crate::model_file::load_model;
use crate::report::{report_csv, summarize, summary_json};
use crate::trace::{check_trace, load_trace, write_trace};

#[derive(Debug, Parser)]
#[command(
    name = "eviohmm",
    version,
    about = "Degree of effectiveness of recorded traces against an evidential IOHMM"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a trace and write the effectiveness time series.
    Eval(EvalArgs),
    /// Replay the two-state walkthrough and check it against the reference tables.
    Demo,
    /// Generate a synthetic trace for a model.
    Gen(GenArgs),
    /// Validate a model file and print an overview.
    Check {
        /// Model file (JSON)
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Plausibility,
    Commonality,
}

impl From<PathArg> for PredictionPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Plausibility => PredictionPath::Plausibility,
            PathArg::Commonality => PredictionPath::Commonality,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    /// Model file (JSON)
    #[arg(long)]
    pub model: PathBuf,
    /// Trace file (CSV)
    #[arg(long)]
    pub trace: PathBuf,
    /// Records per window.
    #[arg(long, default_value_t = 10)]
    pub window: usize,
    /// Records between consecutive windows.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Normalization rule (dempster, yager, dubois-prade); defaults to the model's.
    #[arg(long)]
    pub rule: Option<NormalizationRule>,
    /// CSV report destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional JSON summary destination.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Prediction route.
    #[arg(long, value_enum, default_value_t = PathArg::Plausibility)]
    pub path: PathArg,
}

#[derive(Debug, clap::Args)]
pub struct GenArgs {
    /// Model file (JSON)
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value_t = Scenario::Comfort)]
    pub scenario: Scenario,
    /// Number of records.
    #[arg(long, default_value_t = 100)]
    pub length: usize,
    /// Random seed; equal seeds give byte-identical traces
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trace destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Extra comment line for the trace header (repeatable).
    #[arg(long)]
    pub note: Vec<String>,
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Eval(args) => eval(&args, stdout),
        Command::Demo => {
            let w = demo::walkthrough()?;
            emit(None, &w.text, stdout)?;
            w.verdict()
        }
        Command::Gen(args) => {
            let loaded = load_model(&args.model)?;
            let trace = generate(
                &loaded,
                &GenerateOptions {
                    scenario: args.scenario,
                    length: args.length,
                    seed: args.seed,
                    notes: args.note.clone(),
                },
            )?;
            emit(args.out.as_deref(), &write_trace(&trace), stdout)
        }
        Command::Check { model } => {
            let loaded = load_model(&model)?;
            let m = &loaded.model;
            let text = format!(
                "{}: {} states, {} inputs, {} outputs, evidence {}, normalization {}\n",
                loaded.document.name,
                m.num_states(),
                loaded.document.inputs.len(),
                loaded.document.outputs.len(),
                m.evidence().name(),
                m.normalization().name(),
            );
            emit(None, &text, stdout)
        }
    }
}

pub fn eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<()> {
    let loaded = load_model(&args.model)?;
    let mut model = loaded.model;
    if let Some(rule) = args.rule {
        model = model.with_normalization(rule);
    }
    let origin = args.trace.display().to_string();
    let trace = load_trace(&args.trace)?;
    check_trace(&trace, &model, &origin)?;

    let report = sliding_effectiveness_with(
        &trace.records,
        &model,
        args.window,
        args.stride,
        args.path.into(),
    )
    .map_err(|e| match e {
        eviohmm::Error::TraceTooShort { .. } | eviohmm::Error::InvalidWindow(_) => {
            CliError::Validation {
                path: origin.clone(),
                field: "--window/--stride".into(),
                message: e.to_string(),
            }
        }
        other => CliError::Evaluation(other),
    })?;

    emit(args.out.as_deref(), &report_csv(&report)?, stdout)?;
    if let Some(path) = &args.summary {
        let summary = summarize(&report, &loaded.document.name, model.normalization().name())?;
        emit(Some(path), &summary_json(&summary), stdout)?;
    }
    Ok(())
}
