//! Command-line front end for the coin-duel engine: one subcommand per
//! experiment, JSON reports with an embedded manifest, CSV curves.

pub mod commands;
pub mod grid;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use report::{render_flat_csv, render_json, Manifest};

#[derive(Debug, Parser)]
#[command(
    name = "coin-duel",
    version,
    about = "Tie probabilities of the M&M coin-elimination game"
)]
pub struct Cli {
    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for simulations (results do not depend on it).
    #[arg(long, global = true, env = "COIN_DUEL_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Command {
    /// Exact tie probability for given starting counts and head probability.
    ExactTie(ExactTieArgs),
    /// Exact expected number of turns of the fair game, optionally simulated.
    ExpectedTurns(ExpectedTurnsArgs),
    /// Simulated and exact tie probability across head probabilities.
    TieCurve(TieCurveArgs),
    /// Power-law fit of the fair tie probability against the starting count.
    Powerlaw(PowerlawArgs),
    /// Multi-coin cumulative-sum game.
    Multicoin(MulticoinArgs),
    /// Exponential-hazard game across a grid of rates.
    Evolving(EvolvingArgs),
    /// Correlation of the evolving-game tie rate with rate and starting count.
    Correlation(CorrelationArgs),
    /// Re-run the command recorded in a manifest or JSON report.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExactTieArgs {
    /// Symmetric start: both players hold k.
    #[arg(long, conflicts_with_all = ["i1", "i2"])]
    pub k: Option<u64>,
    #[arg(long, requires = "i2")]
    pub i1: Option<u64>,
    #[arg(long, requires = "i1")]
    pub i2: Option<u64>,
    /// Head probability, decimal or fraction.
    #[arg(long, default_value = "1/2")]
    pub p: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExpectedTurnsArgs {
    #[arg(long)]
    pub i1: u64,
    #[arg(long)]
    pub i2: u64,
    /// Also simulate this many games.
    #[arg(long, value_name = "RUNS")]
    pub simulate: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TieCurveArgs {
    /// Comma list of symmetric starting counts.
    #[arg(long, default_value = "10,50")]
    pub ks: String,
    /// start:stop:step or comma list of head probabilities.
    #[arg(long, default_value = "0.05:1.0:0.05")]
    pub p_grid: String,
    #[arg(long, default_value_t = 10_000)]
    pub runs: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// CSV file for the curve.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PowerlawArgs {
    #[arg(long, default_value_t = 50)]
    pub k_min: u64,
    #[arg(long, default_value_t = 110)]
    pub k_max: u64,
    /// Starting count at which to compare the fitted law with the series.
    #[arg(long, default_value_t = 100_000)]
    pub check_at: u64,
    /// Tail tolerance for the series at the check point.
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MulticoinArgs {
    /// Comma list of nonzero coin values, e.g. 3,-2,-1.
    #[arg(long, allow_hyphen_values = true)]
    pub coins: String,
    #[arg(long, default_value_t = 10)]
    pub target: i64,
    /// Simulated games; required unless --exact or --dual-check alone is wanted.
    #[arg(long)]
    pub runs: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Exact round-count distribution of the stated game.
    #[arg(long)]
    pub exact: bool,
    /// Keep the round total running across rounds instead of re-tossing it;
    /// implies --include-capped.
    #[arg(long, visible_alias = "legacy-appendix-b")]
    pub legacy_accumulation: bool,
    /// Also treat the negated coin set and compare.
    #[arg(long)]
    pub dual_check: bool,
    #[arg(long, default_value_t = coin_duel::multicoin::DEFAULT_FLOOR, allow_hyphen_values = true)]
    pub floor: i64,
    /// Round cap; defaults to 10 * target * number of coins.
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Count two capped players as a tie.
    #[arg(long)]
    pub include_capped: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EvolvingArgs {
    #[arg(long, default_value_t = 200)]
    pub n: u64,
    /// start:stop:count or comma list of hazard rates.
    #[arg(long, default_value = "0.1:5:30")]
    pub lambda_grid: String,
    #[arg(long)]
    pub runs: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Exact depletion-time solver alongside (or instead of) simulation.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fit a Gompertz curve to the exact values (or simulated ones without --exact).
    #[arg(long)]
    pub fit_gompertz: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CorrelationArgs {
    #[arg(long, default_value = "0.1:5:30")]
    pub lambda_grid: String,
    #[arg(long, default_value = "50,100,200")]
    pub n_grid: String,
    #[arg(long, default_value_t = 10_000)]
    pub runs: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also correlate the exact tie probabilities.
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest or full JSON report written with --format json.
    pub manifest: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl From<coin_duel::Error> for CliError {
    fn from(e: coin_duel::Error) -> Self {
        use coin_duel::Error::*;
        match e {
            InvalidFitInput(_) | ConstantSequence => CliError::Compute(e.into()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ExactTie(_) => "exact-tie",
            Command::ExpectedTurns(_) => "expected-turns",
            Command::TieCurve(_) => "tie-curve",
            Command::Powerlaw(_) => "powerlaw",
            Command::Multicoin(_) => "multicoin",
            Command::Evolving(_) => "evolving",
            Command::Correlation(_) => "correlation",
            Command::Replay(_) => "replay",
        }
    }

    /// Seed if the command is stochastic as configured.
    fn seed(&self) -> Option<u64> {
        match self {
            Command::ExpectedTurns(a) => a.simulate.map(|_| a.seed),
            Command::TieCurve(a) => Some(a.seed),
            Command::Multicoin(a) => (a.runs.is_some() || a.dual_check).then_some(a.seed),
            Command::Evolving(a) => a.runs.map(|_| a.seed),
            Command::Correlation(a) => Some(a.seed),
            _ => None,
        }
    }

    fn out(&self) -> Option<&PathBuf> {
        match self {
            Command::TieCurve(a) => a.out.as_ref(),
            Command::Powerlaw(a) => a.out.as_ref(),
            Command::Evolving(a) => a.out.as_ref(),
            Command::Correlation(a) => a.out.as_ref(),
            _ => None,
        }
    }

    pub fn manifest(&self) -> Manifest {
        let tagged = serde_json::to_value(self).expect("serializable command");
        Manifest {
            command: self.name().to_string(),
            params: tagged.get("params").cloned().unwrap_or_default(),
            seed: self.seed(),
            outputs: self
                .out()
                .map(|p| p.display().to_string())
                .into_iter()
                .collect(),
            engine_version: format!("coin-duel {}", coin_duel::ENGINE_VERSION),
        }
    }

    pub fn from_manifest(manifest: &Manifest) -> Result<Self, CliError> {
        let tagged = serde_json::json!({"command": manifest.command, "params": manifest.params});
        serde_json::from_value(tagged)
            .map_err(|e| usage(format!("manifest does not describe a command: {e}")))
    }
}

fn load_manifest(path: &PathBuf) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{} is not JSON: {e}", path.display())))?;
    let inner = value.get("manifest").cloned().unwrap_or(value);
    serde_json::from_value(inner)
        .map_err(|e| usage(format!("{} holds no manifest: {e}", path.display())))
}

/// Executes a command and renders stdout in the requested format.
pub fn execute(command: &Command, format: Format) -> Result<String, CliError> {
    let command = match command {
        Command::Replay(args) => Command::from_manifest(&load_manifest(&args.manifest)?)?,
        other => other.clone(),
    };
    let outcome = commands::run(&command)?;
    if let (Some(path), Some(curve)) = (command.out(), &outcome.curve) {
        curve.write(path)?;
    }
    Ok(match format {
        Format::Text => outcome.text,
        Format::Json => render_json(&command.manifest(), &outcome.result),
        Format::Csv => match &outcome.curve {
            Some(curve) => curve.to_csv(),
            None => render_flat_csv(&outcome.result),
        },
    })
}

/// Parses arguments, runs on a pool of the requested size and returns the exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 1;
        }
    };
    match pool.install(|| execute(&cli.command, cli.format)) {
        Ok(out) => {
            print!("{out}");
            if !out.ends_with('\n') {
                println!();
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
