use std::fmt;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qre_core::GameSpec;

#[derive(Parser, Debug)]
#[command(
    name = "qre",
    version,
    about = "Quantal response equilibria of binary-action Bayesian games"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Indifferent-type sets, Nash benchmark, and (volunteer's dilemma) mean ranges.
    Characterize(CharacterizeArgs),
    /// Build an equilibrium strategy with a chosen indifferent type.
    Construct(ConstructArgs),
    /// Check a strategy against the QRE and symmetric-QRE conditions.
    Verify(VerifyArgs),
    /// Solve for the logit QRE at one precision.
    Solve(SolveArgs),
    /// Solve along a list of precisions.
    Sweep(SweepArgs),
    /// Draw a synthetic (type, action) dataset from a strategy.
    Simulate(SimulateArgs),
    /// Bootstrap test of the compromise-game moment condition on choice data.
    Test(TestArgs),
    /// Numeric series behind the strategy and kernel-estimate figures.
    PlotData(PlotDataArgs),
}

/// Raised for bad or missing flags that clap cannot check on its own.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Args, Debug, Clone)]
pub struct GameArgs {
    /// `vd`, `gg`, `cg`, or a path to a game JSON file.
    #[arg(long)]
    pub game: Option<String>,
    /// Volunteer's dilemma benefit.
    #[arg(long = "B", value_name = "B")]
    pub benefit: Option<f64>,
    /// Global game attack cost.
    #[arg(long)]
    pub k: Option<f64>,
    /// Global game failure penalty.
    #[arg(long)]
    pub c: Option<f64>,
    /// Global game signal noise.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Compromise game payoff.
    #[arg(long = "M", value_name = "M")]
    pub compromise: Option<f64>,
}

impl GameArgs {
    pub fn resolve(&self) -> Result<GameSpec> {
        self.resolve_or(None)
    }

    /// Falls back to `default` when `--game` is absent.
    pub fn resolve_or(&self, default: Option<GameSpec>) -> Result<GameSpec> {
        let need = |v: Option<f64>, flag: &str, game: &str| match v {
            Some(x) => Ok(x),
            None => usage(format!("--game {game} needs --{flag}")),
        };
        let Some(name) = self.game.as_deref() else {
            return match default {
                Some(g) => Ok(g),
                None => usage("--game is required (vd, gg, cg, or a JSON file)"),
            };
        };
        let game = match name {
            "vd" => GameSpec::volunteers_dilemma(need(self.benefit, "B", name)?)?,
            "gg" => GameSpec::global_game(
                need(self.k, "k", name)?,
                need(self.c, "c", name)?,
                need(self.eps, "eps", name)?,
            )?,
            "cg" => GameSpec::compromise_game(need(self.compromise, "M", name)?)?,
            path => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| anyhow::anyhow!("cannot read game file {path}: {e}"))?;
                GameSpec::from_json(&text)?
            }
        };
        Ok(game)
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Qre,
    Sqre,
}

#[derive(Args, Debug)]
pub struct CharacterizeArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, value_enum, default_value = "qre")]
    pub model: Model,
    /// Indifferent type; defaults to the midpoint of the supportable set.
    #[arg(long = "type", value_name = "T")]
    pub indifferent: Option<f64>,
    /// Side moment (QRE) or symmetric deviation (SQRE); defaults to the
    /// midpoint of its admissible range.
    #[arg(long)]
    pub moment: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub ramp_width: f64,
    #[arg(long, default_value_t = 0.5)]
    pub ramp_fraction: f64,
    /// Compromise-game SQRE: σ(0) of the linear branch below the indifferent type.
    #[arg(long, default_value_t = 0.7)]
    pub sigma0: f64,
    /// Compromise-game SQRE: partition size of the symmetric extension.
    #[arg(long, default_value_t = qre_core::characterize::DEFAULT_COMPLETION_PARTITION)]
    pub partition: usize,
    /// Compromise-game SQRE: write the construction trace JSON here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Strategy file (`.json` or `.csv`).
    #[arg(long)]
    pub strategy: PathBuf,
    #[arg(long, default_value_t = qre_core::verify::ESTIMATED_TOL)]
    pub tol: f64,
    /// Number of paired probability levels in the symmetry check.
    #[arg(long, default_value_t = qre_core::verify::DEFAULT_SYMMETRY_PAIRS)]
    pub pairs: usize,
    /// Write the recovered quantal response curve (CSV) here when consistent.
    #[arg(long)]
    pub recover: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1001)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
    /// Fixed-point tolerance (sup-norm).
    #[arg(long = "solver-tol", default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
    /// `half`, `ne`, or a strategy file.
    #[arg(long, default_value = "half")]
    pub init: String,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long)]
    pub lambda: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Comma-separated precisions, ascending.
    #[arg(long, value_delimiter = ',', required = true)]
    pub lambdas: Vec<f64>,
    /// Solve every precision from the initial condition instead of warm-starting.
    #[arg(long)]
    pub cold: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Worker threads for cold sweeps (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Types {
    Continuous,
    Hundredths,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long)]
    pub strategy: PathBuf,
    #[arg(long)]
    pub n: usize,
    /// Random seed; falls back to QRE_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "continuous")]
    pub types: Types,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Unit {
    Rows,
    Subjects,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    /// Choice data CSV with `type` and `action` columns.
    #[arg(long)]
    pub data: PathBuf,
    /// Compromise payoff of the treatment.
    #[arg(long = "M", value_name = "M")]
    pub compromise: f64,
    /// Keep only rows with this treatment label.
    #[arg(long)]
    pub treatment: Option<String>,
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
    /// Random seed; falls back to QRE_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "rows")]
    pub unit: Unit,
    /// Hold the indifferent type at its full-sample estimate in every replicate.
    #[arg(long)]
    pub fix_indifferent_type: bool,
    /// Kernel grid points on [0, 1].
    #[arg(long, default_value_t = qre_core::empirics::DEFAULT_GRID)]
    pub grid: usize,
    /// Worker threads for replicates (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write the full-sample kernel estimate (CSV) here.
    #[arg(long)]
    pub kernel_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PlotDataArgs {
    /// 1: volunteer's dilemma QRE, 2: global game SQRE, 3: compromise game
    /// QRE, 4: kernel estimate of choice data.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub figure: u8,
    #[command(flatten)]
    pub game: GameArgs,
    /// Strategy to plot instead of the constructed default (figures 1-3).
    #[arg(long)]
    pub strategy: Option<PathBuf>,
    /// Type grid points (figures 1-3) or kernel grid points (figure 4).
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Choice data (figure 4).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// `--seed`, else `QRE_SEED`, else 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("QRE_SEED") {
        Ok(v) => match v.trim().parse() {
            Ok(s) => Ok(s),
            Err(_) => usage(format!("QRE_SEED must be a nonnegative integer, got {v:?}")),
        },
        Err(_) => Ok(0),
    }
}
