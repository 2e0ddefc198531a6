//! File formats, parallel execution and the `lacewalk` command line.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod executor;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lacewalk_core::error::Error;
use lacewalk_core::exec::Budget;
use lacewalk_core::model::Model;
use lacewalk_core::scalar::Scalar;
use serde_json::json;

use artifacts::{Artifacts, SCHEMA_MD};
use commands::{Context, Output};
use config::{Arithmetic, ConfigError, Resolved};
pub use executor::RayonExecutor;

pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lacewalk", version, about = "Attractive self-avoiding walks: enumeration, lace expansion, series and sampling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Node-expansion cap, e.g. 1e9.
    #[arg(long, value_parser = parse_count)]
    pub budget: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Connectivities C_n and their moments.
    Enumerate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
    },
    /// Lace kernels Pi_n^(N).
    Lace {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        /// Largest lace size; defaults to n.
        #[arg(long)]
        max_edges: Option<usize>,
    },
    /// All identities, inequalities and bounds up to nmax steps.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        nmax: usize,
    },
    /// Connective-constant estimators and the diffusion constant.
    Series {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        /// Growth constant used in delta; defaults to the last c_{n+1}/c_n.
        #[arg(long)]
        mu: Option<f64>,
    },
    /// Rosenbluth estimates of c_n and the mean-square displacement.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_count, default_value = "100000")]
        count: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Accepts `1000000` as well as `1e6`.
pub fn parse_count(text: &str) -> Result<u64, String> {
    if let Ok(v) = text.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = text.parse().map_err(|_| format!("`{text}` is not a count"))?;
    if v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("`{text}` is not a positive whole number"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("budget exceeded: {0}")]
    Budget(Error),
    #[error(transparent)]
    Core(Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => RunError::Budget(e),
            Error::InvalidParameter(_) | Error::MissingInput(_) | Error::TooManyGraphs { .. } => {
                RunError::Usage(e.to_string())
            }
            other => RunError::Core(other),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Usage(_) => EXIT_INVALID,
            RunError::Budget(_) => EXIT_BUDGET,
            RunError::Core(_) | RunError::Io(_) => 1,
        }
    }
}

/// What a finished run produced.
#[derive(Debug)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub line: String,
    pub failures: usize,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.failures > 0 {
            EXIT_CHECKS_FAILED
        } else {
            0
        }
    }
}

fn dispatch<S: Scalar>(command: &Command, ctx: &Context, model: &Model<S>) -> Result<Output, Error> {
    match command {
        Command::Enumerate { nmax, .. } => commands::enumerate(ctx, model, *nmax),
        Command::Lace { nmax, max_edges, .. } => commands::lace(ctx, model, *nmax, *max_edges),
        Command::Verify { nmax, .. } => commands::verify(ctx, model, *nmax),
        Command::Series { nmax, mu, .. } => commands::series(ctx, model, *nmax, *mu),
        Command::Sample { .. } => unreachable!("sampling always runs in floating point"),
    }
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Enumerate { common, .. }
            | Command::Lace { common, .. }
            | Command::Verify { common, .. }
            | Command::Series { common, .. }
            | Command::Sample { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Enumerate { .. } => "enumerate",
            Command::Lace { .. } => "lace",
            Command::Verify { .. } => "verify",
            Command::Series { .. } => "series",
            Command::Sample { .. } => "sample",
        }
    }

    /// Arguments that change the output.
    fn key(&self, resolved: &Resolved) -> serde_json::Value {
        match self {
            Command::Enumerate { nmax, .. } | Command::Verify { nmax, .. } => json!({"nmax": nmax}),
            Command::Lace { nmax, max_edges, .. } => json!({"nmax": nmax, "maxEdges": max_edges}),
            Command::Series { nmax, mu, .. } => json!({"nmax": nmax, "mu": mu}),
            Command::Sample { n, count, seed, .. } => {
                json!({"n": n, "count": count, "seed": seed.or(resolved.config.seed).unwrap_or(0)})
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<RunSummary, RunError> {
    let command = &cli.command;
    let common = command.common();
    let resolved = config::load(&common.config)?;
    let exec = RayonExecutor::new(common.threads).map_err(|e| RunError::Usage(e.to_string()))?;
    let budget = common
        .budget
        .or(resolved.config.budget.map(|b| b as u64))
        .map_or_else(Budget::default, Budget::new);
    let ctx = Context { exec: &exec, budget };
    let out_dir = common
        .out
        .clone()
        .or_else(|| resolved.config.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));

    let kappa_f64 = Scalar::to_f64(&resolved.kappa);
    let output = match (command, resolved.config.arithmetic) {
        (Command::Sample { n, count, seed, .. }, _) => {
            let model = Model::float(&resolved.distribution, kappa_f64)?;
            commands::sample(&ctx, &model, *n, *count, seed.or(resolved.config.seed).unwrap_or(0))?
        }
        (_, Arithmetic::Float) => dispatch(command, &ctx, &Model::float(&resolved.distribution, kappa_f64)?)?,
        (_, Arithmetic::Rational) => dispatch(command, &ctx, &Model::exact(&resolved.distribution, resolved.kappa.clone())?)?,
    };

    let key = json!({
        "command": command.name(),
        "dimension": resolved.config.dimension,
        "kappa": resolved.kappa.to_string(),
        "step": resolved.step_key,
        "arithmetic": resolved.config.arithmetic,
        "args": command.key(&resolved),
    });
    let mut artifacts = Artifacts::new(&out_dir, command.name(), &key)?;
    let written = (|| -> std::io::Result<()> {
        for t in &output.tables {
            artifacts.csv(t.suffix, &t.header, &t.rows)?;
        }
        artifacts.json(&output.report)?;
        fs::write(out_dir.join("schema.md"), SCHEMA_MD)
    })();
    if let Err(e) = written {
        artifacts.discard();
        return Err(e.into());
    }
    Ok(RunSummary {
        files: artifacts.written().to_vec(),
        line: format!("{}: {} -> {}", command.name(), output.summary, out_dir.join(artifacts.stem()).display()),
        failures: output.failures,
    })
}

/// Parses `args`, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { 0 };
        }
    };
    match run(&cli) {
        Ok(summary) => {
            println!("{}", summary.line);
            summary.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
