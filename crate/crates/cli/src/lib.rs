//! The `opdim` command line: argument parsing, dispatch and deterministic
//! reports. [`run`] does everything but print, so tests can drive it.

mod host;
mod logic;
mod mo;
mod omin;

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use opdim_core::logic::DEFAULT_MAX_UNIVERSE;
use opdim_core::multiorder::DEFAULT_MAX_POINTS;
use opdim_core::patterns::DEFAULT_SELECTOR_BOUND;

pub const MAX_UNIVERSE_ENV: &str = "OPDIM_MAX_UNIVERSE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "opdim", version, about = "op-ranks, op-dimension, patterns and multi-orders")]
struct Cli {
    /// Rank cap: ranks at or above it are reported as at_least.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..))]
    cap: u32,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Search budget: consistency checks for pattern searches, parameter
    /// tuples for multi-order picture checks.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: u64,
    /// Comma-separated witness values replacing the default grid.
    #[arg(long, global = true, value_delimiter = ',')]
    grid: Option<Vec<String>>,
    #[command(subcommand)]
    command: Command,
}

/// A context, a base set and formula sets.
#[derive(Args, Debug)]
struct Target {
    /// "dlo" or a structure JSON file.
    context: String,
    /// Object variables, comma-separated.
    #[arg(long, default_value = "x", value_delimiter = ',')]
    vars: Vec<String>,
    /// Formula in the object variables defining S (default: everything).
    #[arg(long)]
    set: Option<String>,
    /// A formula set Δ, formulas separated by ';'. Repeatable.
    #[arg(long)]
    delta: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// opR_n(S, Δ), with every --delta joined into one Δ.
    Rank {
        #[command(flatten)]
        target: Target,
        #[arg(short = 'n', default_value_t = 1)]
        n: usize,
        /// Also compute the Shelah 2-rank.
        #[arg(long)]
        shelah: bool,
    },
    /// op-dimension of S over the pool of --delta sets.
    Opdim {
        #[command(flatten)]
        target: Target,
    },
    /// Lower bound on dp-rank from ICT pattern search.
    Dprank {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 2)]
        length: usize,
    },
    /// Search for, or verify, an IRD pattern.
    Ird(PatternArgs),
    /// Search for, or verify, an ICT pattern.
    Ict(PatternArgs),
    /// Multi-orders.
    Mo {
        #[command(subcommand)]
        sub: MoCommand,
    },
    /// The dense linear order (ℚ, <).
    Omin {
        #[command(subcommand)]
        sub: OminCommand,
    },
}

#[derive(Args, Debug)]
struct PatternArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = 2)]
    length: usize,
    /// Verify this pattern file instead of searching.
    #[arg(long)]
    check: Option<String>,
}

#[derive(Subcommand, Debug)]
enum MoCommand {
    /// A random multi-order from uniform one-point extensions.
    Gen {
        #[arg(short = 'n', default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        size: usize,
    },
    /// Count (and optionally list) the multi-cuts.
    Cuts {
        file: String,
        #[arg(long)]
        list: bool,
    },
    /// The rank embedding into (N^n, coordinatewise).
    Embed { file: String },
    /// The grid (2^N)^n linearized order by order.
    Linearize {
        #[arg(long = "side-log")]
        side_log: u32,
        #[arg(short = 'n', default_value_t = 2)]
        n: usize,
    },
    /// Amalgamate B and C over A; the file holds a, b, c, e1, e2.
    Amalgamate { file: String },
    /// Whether every one-point type over ≤ k elements is realized.
    Extcheck {
        file: String,
        #[arg(short = 'k', default_value_t = 1)]
        k: usize,
    },
    /// Check that a picture makes every multi-cut definable.
    Moptest { context: String, file: String },
}

#[derive(Subcommand, Debug)]
enum OminCommand {
    /// Quantifier elimination.
    Qe {
        formula: String,
        #[arg(short = 'm')]
        m: Option<usize>,
    },
    /// Dimension of the defined set.
    Dim {
        formula: String,
        #[arg(short = 'm')]
        m: Option<usize>,
        #[arg(long, value_enum, default_value_t = Method::Projection)]
        method: Method,
    },
    /// The order diagrams making up the set.
    Cells {
        formula: String,
        #[arg(short = 'm')]
        m: Option<usize>,
    },
    /// An IRD pattern of depth dim inside the set, verified.
    Irdwitness {
        formula: String,
        #[arg(short = 'm')]
        m: Option<usize>,
        #[arg(long, default_value_t = 3)]
        length: usize,
    },
    /// dim(X × Y) against dim X + dim Y.
    Prodcheck {
        x: String,
        y: String,
        #[arg(long)]
        m1: Option<usize>,
        #[arg(long)]
        m2: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Diagram,
    Projection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub cap: u32,
    pub seed: u64,
    pub format: Format,
    pub budget: u64,
    pub grid: Option<Vec<String>>,
    pub max_universe: usize,
    pub max_points: usize,
    pub selector_bound: u64,
}

/// What a command produced: the JSON payload and a one-line summary.
pub(crate) struct Payload {
    pub value: Value,
    pub summary: String,
}

impl Payload {
    pub(crate) fn new<T: Serialize>(value: &T, summary: String) -> Result<Payload, Failure> {
        Ok(Payload {
            value: serde_json::to_value(value).map_err(|e| Failure::input("Json", e.to_string()))?,
            summary,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub config: RunConfig,
    pub result: Value,
    pub summary: String,
    pub timing_ms: f64,
    /// SHA-256 of the compact JSON of `result`.
    pub hash: String,
}

/// An error with its exit code: 2 for bad input, 3 for a hit bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub kind: String,
    pub message: String,
    #[serde(skip)]
    pub code: i32,
}

impl Failure {
    pub(crate) fn input(kind: &str, message: String) -> Self {
        Failure {
            kind: kind.to_string(),
            message,
            code: 2,
        }
    }
}

impl From<opdim_core::Error> for Failure {
    fn from(e: opdim_core::Error) -> Self {
        Failure {
            kind: e.kind().to_string(),
            message: e.to_string(),
            code: if e.is_budget() { 3 } else { 2 },
        }
    }
}

pub(crate) fn read(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input("Io", format!("{path}: {e}")))
}

pub(crate) fn json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::input("Json", format!("{path}: {e}")))
}

pub fn payload_hash(result: &Value) -> String {
    let text = serde_json::to_string(result).expect("values serialize");
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// The outcome of one invocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<Report>,
    pub failure: Option<Failure>,
}

fn size_override(value: Option<String>) -> Result<Option<usize>, Failure> {
    match value {
        Some(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .map(Some)
            .ok_or_else(|| Failure::input("InvalidConfig", format!("{MAX_UNIVERSE_ENV}={v} is not a positive integer"))),
        None => Ok(None),
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Payload, Failure> {
    match cmd {
        Command::Rank { target, n, shelah } => logic::rank(target, *n, *shelah, cfg),
        Command::Opdim { target } => logic::opdim(target, cfg),
        Command::Dprank { target, length } => logic::dprank(target, *length, cfg),
        Command::Ird(a) => logic::pattern(a, opdim_core::PatternKind::Ird, cfg),
        Command::Ict(a) => logic::pattern(a, opdim_core::PatternKind::Ict, cfg),
        Command::Mo { sub } => mo::run(sub, cfg),
        Command::Omin { sub } => omin::run(sub, cfg),
    }
}

/// Parses `args` (without the program name) and runs the command, taking
/// the size cap override from the environment.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    run_with(args, std::env::var(MAX_UNIVERSE_ENV).ok())
}

/// [`run`] with the value of the size cap override given directly.
pub fn run_with<I, S>(args: I, size_cap: Option<String>) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let command: Vec<String> = args.into_iter().map(Into::into).collect();
    let argv = std::iter::once("opdim".to_string()).chain(command.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Outcome {
                code,
                stdout,
                stderr,
                report: None,
                failure: (code != 0).then(|| Failure::input("Usage", e.kind().to_string())),
            };
        }
    };
    let format = cli.format;
    let fail = |f: Failure| {
        let (stdout, stderr) = match format {
            Format::Json => (
                serde_json::to_string_pretty(&serde_json::json!({"command": command, "error": f, "exit_code": f.code}))
                    .expect("errors serialize")
                    + "\n",
                String::new(),
            ),
            Format::Text if f.message.starts_with(&f.kind) => (String::new(), format!("error: {}\n", f.message)),
            Format::Text => (String::new(), format!("error: {}: {}\n", f.kind, f.message)),
        };
        Outcome {
            code: f.code,
            stdout,
            stderr,
            report: None,
            failure: Some(f),
        }
    };
    let cfg = match size_override(size_cap) {
        Ok(cap) => RunConfig {
            cap: cli.cap,
            seed: cli.seed,
            format,
            budget: cli.budget,
            grid: cli.grid.clone(),
            max_universe: cap.unwrap_or(DEFAULT_MAX_UNIVERSE),
            max_points: cap.unwrap_or(DEFAULT_MAX_POINTS),
            selector_bound: DEFAULT_SELECTOR_BOUND,
        },
        Err(f) => return fail(f),
    };
    let start = Instant::now();
    let payload = match dispatch(&cli.command, &cfg) {
        Ok(p) => p,
        Err(f) => return fail(f),
    };
    let report = Report {
        command: command.clone(),
        config: cfg,
        hash: payload_hash(&payload.value),
        result: payload.value,
        summary: payload.summary,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let stdout = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("reports serialize") + "\n",
        Format::Text => format!(
            "{}\nhash: {}\ntime: {:.1} ms\n",
            report.summary, report.hash, report.timing_ms
        ),
    };
    Outcome {
        code: 0,
        stdout,
        stderr: String::new(),
        report: Some(report),
        failure: None,
    }
}
