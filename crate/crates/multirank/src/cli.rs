//! The `multirank` command line.
//!
//! Exit status: 0 on success, 2 for argument and domain errors, 1 when a
//! numeric evaluation fails (series tolerance not reached, evaluation routes
//! disagreeing). Data goes to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multirank_core::asymptotic::{self, SeriesEvalPolicy};
use multirank_core::finite::{self, EvalMode, Strategy, StrategyKind};
use multirank_core::montecarlo::{SimulationConfig, DEFAULT_CHUNK_SIZE};
use multirank_core::optimize::{self, strict_fraction_exponent_k, strict_optimal_fraction};
use multirank_core::ProblemSize;

use crate::output::{write_curve, write_record, write_table, Format, Mode, OutputRecord};
use crate::parallel::{estimate_parallel, table_parallel};

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] multirank_core::Error),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numeric() => 1,
            CliError::Core(_) | CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    /// Select the first item ranked at least as high as the prefix maximum.
    Inclusive,
    /// Select the first item ranked strictly higher than the prefix maximum.
    Strict,
}

impl From<StrategyArg> for StrategyKind {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Inclusive => StrategyKind::Inclusive,
            StrategyArg::Strict => StrategyKind::Strict,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Exact rationals up to k*n = 64 items, log-space floats beyond.
    Auto,
    Exact,
    Float,
}

impl From<ModeArg> for EvalMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Auto => EvalMode::Auto,
            ModeArg::Exact => EvalMode::Exact,
            ModeArg::Float => EvalMode::Float,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "multirank",
    version,
    about = "Secretary problem with k items at each of n ranks: exact, simulated and limiting win probabilities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SizeArgs {
    /// Number of ranks.
    #[arg(long)]
    pub n: u64,
    /// Items at each rank.
    #[arg(long)]
    pub k: u64,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Threshold strategy family.
    #[arg(long, value_enum, default_value = "inclusive")]
    pub strategy: StrategyArg,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact win probability of a cutoff strategy at finite n.
    Exact {
        #[command(flatten)]
        size: SizeArgs,
        /// Cutoff: number of items let pass.
        #[arg(long)]
        m: u64,
        /// Arithmetic mode.
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        #[command(flatten)]
        common: Common,
    },
    /// Win probability by enumerating every arrangement (k*n <= 12).
    Brute {
        #[command(flatten)]
        size: SizeArgs,
        /// Cutoff: number of items let pass.
        #[arg(long)]
        m: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate of the win probability.
    Simulate {
        #[command(flatten)]
        size: SizeArgs,
        /// Cutoff: number of items let pass.
        #[arg(long)]
        m: u64,
        /// Number of simulated plays.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Base seed; chunk i uses stream i of this seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Plays per chunk.
        #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE)]
        chunk_size: u64,
        /// Worker threads; the result does not depend on this.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Limiting win probability as n grows with M ~ c k n.
    Limit {
        /// Items at each rank.
        #[arg(long)]
        k: u32,
        /// Cutoff fraction in (0, 1); 0 and 1 give the continuous extension.
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Limiting win probability on a grid of c from 0 to 1.
    Curve {
        /// Items at each rank.
        #[arg(long)]
        k: u32,
        /// Grid step.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Best cutoff at finite n, or best fraction c in the limit.
    Optimize {
        /// Scan every cutoff for this number of ranks.
        #[arg(
            long,
            value_name = "N",
            conflicts_with = "asymptotic",
            required_unless_present = "asymptotic"
        )]
        finite: Option<u64>,
        /// Maximize the limiting probability over c.
        #[arg(long)]
        asymptotic: bool,
        /// Items at each rank.
        #[arg(long)]
        k: u32,
        /// Arithmetic mode for --finite.
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        #[command(flatten)]
        common: Common,
    },
    /// Optimal c and optimal limiting probability for several k.
    Table {
        /// Comma-separated values of k.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "2,3,4,5,6,7,8,9,10,15,20,25"
        )]
        k: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn size_of(args: &SizeArgs) -> CliResult<ProblemSize> {
    Ok(ProblemSize::new(args.n, args.k)?)
}

fn finite_record(command: &str, size: ProblemSize, strategy: Strategy) -> OutputRecord {
    OutputRecord::new(command, Mode::Exact)
        .input("n", size.n())
        .input("k", size.k())
        .input("m", strategy.cutoff)
        .input("strategy", strategy.kind.name())
}

pub fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<()> {
    let policy = SeriesEvalPolicy::default();
    match command {
        Command::Exact {
            size,
            m,
            mode,
            common,
        } => {
            let size = size_of(&size)?;
            let strategy = Strategy::new(common.strategy.into(), m);
            let p = finite::win_probability(size, strategy, mode.into())?;
            let mut rec = finite_record("exact", size, strategy).probability("probability", &p);
            rec.mode = Mode::of(&p);
            write_record(out, &rec, common.format)
        }
        Command::Brute { size, m, common } => {
            let size = size_of(&size)?;
            let strategy = Strategy::new(common.strategy.into(), m);
            let p = finite::brute_force_win_probability(size, strategy)?;
            let rec = finite_record("brute", size, strategy).probability("probability", &p);
            write_record(out, &rec, common.format)
        }
        Command::Simulate {
            size,
            m,
            trials,
            seed,
            chunk_size,
            workers,
            common,
        } => {
            let size = size_of(&size)?;
            let strategy = Strategy::new(common.strategy.into(), m);
            let config = SimulationConfig::new(trials, seed).with_chunk_size(chunk_size);
            let report = estimate_parallel(size, strategy, &config, workers)?;
            let mut rec = finite_record("simulate", size, strategy)
                .input("trials", trials)
                .input("seed", seed)
                .input("chunk_size", chunk_size)
                .field("estimate", report.estimate)
                .field("std_error", report.std_error)
                .field("wins", report.wins)
                .field("trials", report.trials);
            rec.mode = Mode::Estimate;
            write_record(out, &rec, common.format)
        }
        Command::Limit { k, c, common } => {
            let kind: StrategyKind = common.strategy.into();
            let value = asymptotic::limit_on_closed_interval(kind, k, c, &policy)?;
            let rec = OutputRecord::new("limit", Mode::Float)
                .input("k", k)
                .input("c", c)
                .input("strategy", kind.name())
                .field("probability", value);
            write_record(out, &rec, common.format)
        }
        Command::Curve { k, step, common } => {
            if !(step > 0.0 && step <= 1.0) {
                return Err(CliError::Usage(format!("step {step} must lie in (0, 1]")));
            }
            let kind: StrategyKind = common.strategy.into();
            let count = (1.0 / step).round() as usize;
            let mut points = Vec::with_capacity(count + 1);
            for i in 0..=count {
                let c = (i as f64 * step).min(1.0);
                points.push((
                    c,
                    asymptotic::limit_on_closed_interval(kind, k, c, &policy)?,
                ));
            }
            if points.last().is_some_and(|&(c, _)| c < 1.0) {
                points.push((1.0, asymptotic::limit_boundary_extension(k, 1.0, kind)?));
            }
            write_curve(out, &points, common.format)
        }
        Command::Optimize {
            finite: Some(n),
            k,
            mode,
            common,
            ..
        } => {
            let size = ProblemSize::new(n, u64::from(k))?;
            let kind: StrategyKind = common.strategy.into();
            let best = optimize::best_cutoff_finite(size, kind, mode.into())?;
            let mut rec = OutputRecord::new("optimize", Mode::of(&best.value))
                .input("finite", n)
                .input("k", k)
                .input("strategy", kind.name())
                .field("m_star", best.cutoff().expect("scan returns a cutoff"))
                .probability("p_star", &best.value)
                .field("method", best.method.name())
                .field("evaluations", best.evaluations);
            rec.mode = Mode::of(&best.value);
            write_record(out, &rec, common.format)
        }
        Command::Optimize { k, common, .. } => {
            let kind: StrategyKind = common.strategy.into();
            let best = optimize::best_c_asymptotic(k, kind, &policy)?;
            let (grid_c, grid_value) = best.grid_best.expect("grid search");
            let mut rec = OutputRecord::new("optimize", Mode::Float)
                .input("asymptotic", true)
                .input("k", k)
                .input("strategy", kind.name())
                .field("c_star", best.fraction().expect("continuous search"))
                .field("p_star", best.value.to_f64())
                .field("method", best.method.name())
                .field("tolerance", best.tolerance)
                .field("evaluations", best.evaluations)
                .field("grid_c", grid_c)
                .field("grid_value", grid_value);
            if kind == StrategyKind::Strict {
                rec = strict_flags(rec, k, best.fraction().unwrap_or(f64::NAN));
            }
            write_record(out, &rec, common.format)
        }
        Command::Table { k, common } => {
            if k.is_empty() || k.contains(&0) {
                return Err(CliError::Usage("k values must be positive integers".into()));
            }
            let rows = table_parallel(&k, common.strategy.into(), &policy)?;
            write_table(out, &rows, common.format)
        }
    }
}

/// Compares the numerically found strict optimum with the two closed-form
/// candidates `1 - (1-1/e)^(1/k)` and `1 - (1-1/e)^k`.
fn strict_flags(rec: OutputRecord, k: u32, c_star: f64) -> OutputRecord {
    const TOL: f64 = 1e-5;
    let inverse = strict_optimal_fraction(k);
    let power = strict_fraction_exponent_k(k);
    let matches_inverse = (c_star - inverse).abs() <= TOL;
    let matches_power = (c_star - power).abs() <= TOL;
    let mut rec = rec
        .field("c_closed_form_inverse_exponent", inverse)
        .field("c_closed_form_exponent_k", power)
        .field("matches_inverse_exponent", matches_inverse)
        .field("matches_exponent_k", matches_power);
    if matches_inverse && !matches_power {
        rec = rec.field(
            "note",
            "the maximizer is 1-(1-1/e)^(1/k); the fraction 1-(1-1/e)^k does not maximize for k > 1",
        );
    }
    rec
}
