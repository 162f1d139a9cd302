//! The `kraus` command line: argument parsing, dispatch and reports.

pub mod input;
mod commands;

use std::ffi::OsString;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or out-of-range user input.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Compute(#[from] kraus_core::Error),
}

#[derive(Parser, Debug, Serialize)]
#[command(name = "kraus", version, about = "Exact elliptic-curve and number-field computations around the Fermat equation")]
pub struct Cli {
    /// Worker threads for searches (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the JSON report to this path ("-" for stdout).
    #[arg(long, global = true, value_name = "OUT")]
    #[serde(skip)]
    pub json: Option<String>,
    /// Time budget for each integer factorization, in milliseconds.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub budget_ms: u64,
    /// Height bound for exact square roots and root searches.
    #[arg(long, global = true, default_value_t = kraus_core::nf::DEFAULT_HEIGHT_BOUND)]
    pub sqrt_height: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Field hypotheses and the real cyclotomic tower.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Invariants, local reduction and conductors of a model.
    #[command(subcommand)]
    Curve(CurveCmd),
    /// Quadratic-twist normalization with a certificate.
    #[command(subcommand)]
    Kraus(KrausCmd),
    /// Fermat solutions and their Frey curves.
    #[command(subcommand)]
    Frey(FreyCmd),
    /// Bounded conductor searches and trace congruences.
    #[command(subcommand)]
    Scout(ScoutCmd),
    /// Witness, Frey curve, normalization and hypothesis audit in one run.
    FltPipeline(PipelineArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldCmd {
    /// Scorecards for the conductor-prime and asymptotic FLT criteria.
    Audit(AuditArgs),
    /// Build Q(zeta_2^r)+ and check its shape at 2.
    Cyclotomic(CyclotomicArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct FieldArg {
    /// Builtin name (Q, Qsqrt<m>, Zeta16plus, ...), a JSON coefficient list, or a JSON file.
    #[arg(long, default_value = "Q")]
    pub field: String,
}

#[derive(Args, Debug, Serialize)]
pub struct PrimeArg {
    /// Rational prime below the prime ideal.
    #[arg(long, default_value_t = 2)]
    pub prime: u64,
    /// Which prime above it, in canonical order.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct AuditArgs {
    #[command(flatten)]
    pub field: FieldArg,
    /// The prime l of the conductor-prime criterion.
    #[arg(long, default_value_t = 2)]
    pub l: u64,
    /// A root of the l-th cyclotomic polynomial in K (needed for odd l).
    #[arg(long)]
    pub witness: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct CyclotomicArgs {
    #[arg(long)]
    pub r: u32,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveCmd {
    Invariants(CurveArgs),
    Reduce(ReduceArgs),
    Conductor(CurveArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CurveArgs {
    #[command(flatten)]
    pub field: FieldArg,
    /// JSON list [a1, a2, a3, a4, a6]; entries are integers, "num/den" or coordinate lists.
    #[arg(long)]
    pub ainvs: String,
}

#[derive(Args, Debug, Serialize)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub prime: PrimeArg,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KrausCmd {
    Normalize(NormalizeArgs),
}

#[derive(Args, Debug, Serialize)]
#[group(id = "source", required = true, args = ["triple", "lam"])]
pub struct NormalizeArgs {
    #[command(flatten)]
    pub field: FieldArg,
    /// JSON triple [a, b, c] with a + b + c = 0.
    #[arg(long)]
    pub triple: Option<String>,
    /// Certify Y^2 = X(X + 1)(X + lam) directly.
    #[arg(long)]
    pub lam: Option<String>,
    #[command(flatten)]
    pub prime: PrimeArg,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreyCmd {
    Check(WitnessArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub field: FieldArg,
    /// JSON object {"a": .., "b": .., "c": .., "p": 3}.
    #[arg(long)]
    pub witness: String,
    #[command(flatten)]
    pub prime: PrimeArg,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoutCmd {
    Search(SearchArgs),
    Congruence(CongruenceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TorsionArg {
    Any,
    Full,
}

#[derive(Args, Debug, Serialize)]
pub struct SearchArgs {
    #[command(flatten)]
    pub field: FieldArg,
    /// Rational prime below the target conductor prime.
    #[arg(long, conflicts_with = "conductor")]
    pub target: Option<u64>,
    /// Which prime above the target, in canonical order.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Rational conductor whose primes are inert or totally ramified.
    #[arg(long)]
    pub conductor: Option<u64>,
    /// Bound on every coordinate of A and B.
    #[arg(long)]
    pub height: u64,
    #[arg(long, value_enum, default_value_t = TorsionArg::Any)]
    pub torsion: TorsionArg,
}

#[derive(Args, Debug, Serialize)]
pub struct CongruenceArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long)]
    pub l: u64,
    /// Largest residue-field size scanned.
    #[arg(long, default_value_t = 500)]
    pub q_bound: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub witness: WitnessArgs,
}

/// The machine-readable result of one invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandReport {
    pub command: String,
    pub inputs: Value,
    pub outcome: Value,
    /// Source tags of every fact used without being computed.
    pub provenance_notes: Vec<String>,
    pub exit_code: i32,
}

/// A report together with its human-readable rendering.
#[derive(Clone, Debug)]
pub struct Execution {
    pub report: CommandReport,
    pub text: String,
}

/// What a command hands back before the report is assembled.
#[derive(Default)]
pub(crate) struct Outcome {
    pub body: serde_json::Map<String, Value>,
    pub failures: Vec<String>,
    pub unresolved: Vec<String>,
    pub provenance: Vec<String>,
    pub text: String,
}

pub(crate) struct Context {
    pub jobs: usize,
    pub budget: Duration,
    pub sqrt_height: u64,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Field(FieldCmd::Audit(_)) => "field audit",
            Command::Field(FieldCmd::Cyclotomic(_)) => "field cyclotomic",
            Command::Curve(CurveCmd::Invariants(_)) => "curve invariants",
            Command::Curve(CurveCmd::Reduce(_)) => "curve reduce",
            Command::Curve(CurveCmd::Conductor(_)) => "curve conductor",
            Command::Kraus(KrausCmd::Normalize(_)) => "kraus normalize",
            Command::Frey(FreyCmd::Check(_)) => "frey check",
            Command::Scout(ScoutCmd::Search(_)) => "scout search",
            Command::Scout(ScoutCmd::Congruence(_)) => "scout congruence",
            Command::FltPipeline(_) => "flt-pipeline",
        }
    }
}

fn error_kind(e: &kraus_core::Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn error_report(command: &str, inputs: Value, err: &CliError) -> Execution {
    let (code, kind) = match err {
        CliError::Input(_) => (EXIT_USAGE, "input".to_string()),
        CliError::Compute(e) => (EXIT_FAILURE, error_kind(e)),
    };
    let message = err.to_string();
    let outcome = serde_json::json!({
        "error": { "kind": kind, "message": message },
        "failures": [message],
        "unresolved": [],
    });
    Execution {
        report: CommandReport {
            command: command.to_string(),
            inputs,
            outcome,
            provenance_notes: Vec::new(),
            exit_code: code,
        },
        text: format!("error: {message}\n"),
    }
}

/// Run an already-parsed command line.
pub fn run(cli: &Cli) -> Execution {
    let command = cli.command.name();
    let inputs = serde_json::to_value(cli).unwrap_or(Value::Null);
    let ctx = Context {
        jobs: cli
            .jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1),
        budget: Duration::from_millis(cli.budget_ms),
        sqrt_height: cli.sqrt_height,
    };
    match commands::execute(&cli.command, &ctx) {
        Ok(out) => {
            let mut body = out.body;
            let exit_code = if out.failures.is_empty() && out.unresolved.is_empty() {
                EXIT_OK
            } else {
                EXIT_FAILURE
            };
            body.insert("failures".into(), serde_json::json!(out.failures));
            body.insert("unresolved".into(), serde_json::json!(out.unresolved));
            let mut provenance = out.provenance;
            provenance.sort();
            provenance.dedup();
            Execution {
                report: CommandReport {
                    command: command.to_string(),
                    inputs,
                    outcome: Value::Object(body),
                    provenance_notes: provenance,
                    exit_code,
                },
                text: out.text,
            }
        }
        Err(e) => error_report(command, inputs, &e),
    }
}

/// Parse `argv` (program name first) and run it. Usage errors give exit
/// code 2; `--help` and `--version` give 0 with the rendered text.
pub fn execute<I, T>(argv: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            Execution {
                report: CommandReport {
                    command: String::new(),
                    inputs: Value::Null,
                    outcome: serde_json::json!({
                        "error": { "kind": "usage", "message": text },
                        "failures": if code == EXIT_OK { vec![] } else { vec![text.clone()] },
                        "unresolved": [],
                    }),
                    provenance_notes: Vec::new(),
                    exit_code: code,
                },
                text,
            }
        }
    }
}

pub fn dispatch<I, T>(argv: I) -> CommandReport
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    execute(argv).report
}
