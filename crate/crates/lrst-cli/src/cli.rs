//! Command-line frontend. The report goes to stdout (or `--output`);
//! progress and timing notes go to stderr. Exit codes: 0 on success, 2 on
//! input/validation errors, 3 on numerical degeneracy.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lrst_core::{
    bonferroni_univariate, harmonize_directions, multi_arm_lrst, LrstOptions, TestError,
};

use crate::bench::{bench_to_csv, default_grid, runtime_bench};
use crate::io::load_csv;
use crate::report::{build_test_report, render_pretty};
use crate::schema::load_schema;
use crate::simulator::{ScenarioFile, StudyKind};
use crate::study::{power_study, reports_to_csv, reports_to_long_csv, type1_study, StudyOptions};

#[derive(Debug, Parser)]
#[command(
    name = "lrst",
    version,
    about = "Multi-arm longitudinal rank-sum test: analysis, simulation studies, benchmarks"
)]
pub struct Cli {
    /// Cap the worker threads used for parallel replications.
    #[arg(long, global = true, env = "LRST_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the test on a long-format trial CSV.
    Test(TestArgs),
    /// Run a simulation study from a scenario file.
    Simulate(SimulateArgs),
    /// Benchmark single-test runtime across trial sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestFormat {
    Pretty,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudyFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Trial data CSV with columns subject_id,arm,visit,outcome,value.
    #[arg(long, env = "LRST_INPUT")]
    pub input: PathBuf,
    /// Schema config (TOML or JSON): control arm, dose order, outcome
    /// order and directions.
    #[arg(long, env = "LRST_SCHEMA")]
    pub schema: PathBuf,
    #[arg(long, default_value_t = 0.05, env = "LRST_ALPHA")]
    pub alpha: f64,
    /// Monte-Carlo draws for the 3+ dose-arm p-value.
    #[arg(long, default_value_t = 1_000_000, env = "LRST_MC_DRAWS")]
    pub mc_draws: usize,
    #[arg(long, default_value_t = 0, env = "LRST_SEED")]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, env = "LRST_OUTPUT")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TestFormat::Pretty, env = "LRST_FORMAT")]
    pub format: TestFormat,
    /// Use the Monte-Carlo p-value path even when a closed form exists.
    #[arg(long)]
    pub force_monte_carlo: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file (TOML or JSON).
    #[arg(long, env = "LRST_SCENARIO")]
    pub scenario: PathBuf,
    /// Override the scenario's replication count.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Override the scenario's seed.
    #[arg(long, env = "LRST_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "LRST_OUTPUT")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StudyFormat::Csv, env = "LRST_FORMAT")]
    pub format: StudyFormat,
    /// Also write a long-format plot-ready CSV here.
    #[arg(long)]
    pub plot_output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Control-arm sizes.
    #[arg(long, value_delimiter = ',')]
    pub n_control: Vec<usize>,
    /// Dose-arm counts.
    #[arg(long, value_delimiter = ',')]
    pub arms: Vec<usize>,
    /// Runs per cell (minimum 5); the median is reported.
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    #[arg(long, default_value_t = 1_000_000, env = "LRST_MC_DRAWS")]
    pub mc_draws: usize,
    #[arg(long, default_value_t = 0, env = "LRST_SEED")]
    pub seed: u64,
    #[arg(long, env = "LRST_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Input or validation problem — exit code 2.
    #[error("{0}")]
    Input(String),
    /// Numerical degeneracy (constant panels) — exit code 3.
    #[error("{0}")]
    Degenerate(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

fn map_test_error(e: TestError) -> CliError {
    match e {
        TestError::DegenerateVariance { .. } => CliError::Degenerate(e.to_string()),
        TestError::WrongArity { .. } => CliError::Input(e.to_string()),
    }
}

fn emit(output: Option<&Path>, payload: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, payload)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(payload.as_bytes())
                .map_err(|e| CliError::Other(e.into()))
        }
    }
}

pub fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // ignore the error if a pool was already installed (tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match cli.command {
        Command::Test(args) => cmd_test(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Bench(args) => cmd_bench(&args),
    }
}

fn validate_common(alpha: f64, mc_draws: usize) -> Result<(), CliError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Input(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if mc_draws < 1000 {
        return Err(CliError::Input(format!(
            "mc-draws must be at least 1000, got {mc_draws}"
        )));
    }
    Ok(())
}

pub fn cmd_test(args: &TestArgs) -> Result<(), CliError> {
    validate_common(args.alpha, args.mc_draws)?;
    let schema = load_schema(&args.schema).map_err(|e| CliError::Input(e.to_string()))?;
    let ds = load_csv(&args.input, &schema).map_err(|e| CliError::Input(e.to_string()))?;
    let ds = harmonize_directions(ds, &schema.outcome_specs())
        .map_err(|e| CliError::Input(e.to_string()))?;

    let opts = LrstOptions {
        mc_draws: args.mc_draws,
        seed: args.seed,
        force_monte_carlo: args.force_monte_carlo,
    };
    let result = multi_arm_lrst(&ds, &opts).map_err(map_test_error)?;
    let comparator = bonferroni_univariate(&ds, args.alpha).map_err(map_test_error)?;
    let report = build_test_report(&ds, &result, &comparator, args.alpha);

    let payload = match args.format {
        TestFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Other(e.into()))?;
            s.push('\n');
            s
        }
        TestFormat::Pretty => render_pretty(&report),
    };
    emit(args.output.as_deref(), &payload)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let mut file =
        ScenarioFile::load(&args.scenario).map_err(|e| CliError::Input(e.to_string()))?;
    if let Some(reps) = args.reps {
        file.replications = reps;
    }
    if let Some(seed) = args.seed {
        file.seed = seed;
    }
    let scenario = file
        .build_scenario()
        .map_err(|e| CliError::Input(e.to_string()))?;
    let grid = file
        .study_grid()
        .map_err(|e| CliError::Input(e.to_string()))?;
    let opts = StudyOptions {
        replications: file.replications,
        alpha: file.alpha,
        mc_draws: file.mc_draws,
    };

    eprintln!(
        "running {} grid point(s) x {} replication(s), N = {} ({} + {:?})",
        grid.len(),
        opts.replications,
        scenario.n_total(),
        scenario.n_control,
        scenario.n_doses
    );

    let reports = match file.kind {
        StudyKind::Type1 => vec![type1_study(&scenario, &opts).map_err(map_test_error)?],
        StudyKind::Power => power_study(&scenario, &grid, &opts).map_err(map_test_error)?,
    };
    for (i, r) in reports.iter().enumerate() {
        eprintln!(
            "point {i}: rejection rate {:.4}, comparator {:.4} ({:.2}s)",
            r.rejection_rate, r.comparator_rate, r.wall_time_s
        );
    }

    let payload = match args.format {
        StudyFormat::Csv => reports_to_csv(&reports),
        StudyFormat::Json => {
            let mut s =
                serde_json::to_string_pretty(&reports).map_err(|e| CliError::Other(e.into()))?;
            s.push('\n');
            s
        }
    };
    emit(args.output.as_deref(), &payload)?;
    if let Some(plot) = &args.plot_output {
        fs::write(plot, reports_to_long_csv(&reports))
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", plot.display())))?;
    }
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    validate_common(0.05, args.mc_draws)?;
    let grid: Vec<(usize, usize)> = if args.n_control.is_empty() && args.arms.is_empty() {
        default_grid()
    } else {
        let n_controls = if args.n_control.is_empty() {
            vec![200, 300, 400, 500]
        } else {
            args.n_control.clone()
        };
        let arms = if args.arms.is_empty() {
            vec![2, 3, 4, 5, 6]
        } else {
            args.arms.clone()
        };
        if arms.contains(&0) {
            return Err(CliError::Input("dose-arm counts must be positive".into()));
        }
        n_controls
            .iter()
            .flat_map(|&n| arms.iter().map(move |&a| (n, a)))
            .collect()
    };
    if grid.iter().any(|&(n, _)| n < 2) {
        return Err(CliError::Input("control arms need at least 2 subjects".into()));
    }
    eprintln!("benchmarking {} cell(s), {} run(s) each", grid.len(), args.runs.max(5));
    let cells = runtime_bench(&grid, args.runs, args.mc_draws, args.seed);
    emit(args.output.as_deref(), &bench_to_csv(&cells))
}
