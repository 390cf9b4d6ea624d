use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracopt_harness::check::run_checks;
use fracopt_harness::experiment::render_table;
use fracopt_harness::{reproduce, run_experiment, ExperimentSpec, HarnessError, RunOptions, Target};

/// Fractional-order optimization experiments.
#[derive(Parser)]
#[command(name = "fracopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Base seed, overriding the one in the spec.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Also write wall-clock timings (timing.csv).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML spec.
    Run { spec: PathBuf },
    /// Regenerate the data behind a figure or table: fig1..fig4, table1, table2.
    Reproduce { target: String },
    /// Run the quick invariant suite.
    Check,
}

const EXIT_DIVERGED: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions { out_dir: cli.out.clone(), workers: cli.workers, seed: cli.seed, timing: cli.timing };
    let outcome = match &cli.command {
        Command::Run { spec } => run(spec, &opts),
        Command::Reproduce { target } => run_target(target, &opts),
        Command::Check => Ok(check()),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(path: &PathBuf, opts: &RunOptions) -> Result<ExitCode, HarnessError> {
    let spec = ExperimentSpec::load(path)?;
    let report = run_experiment(&spec, opts)?;
    print!("{}", render_table(&report.records, &report.thresholds));
    println!("summary written to {}", report.summary_path().display());
    Ok(if report.all_completed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_DIVERGED) })
}

fn run_target(name: &str, opts: &RunOptions) -> Result<ExitCode, HarnessError> {
    let target: Target = name.parse()?;
    let report = reproduce(target, opts)?;
    print!("{}", report.table);
    println!("output written to {}", report.dir.display());
    Ok(if report.all_completed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_DIVERGED) })
}

fn check() -> ExitCode {
    let outcomes = run_checks();
    for o in &outcomes {
        println!("{} {:<40} {} ({:.2}s)", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail, o.seconds);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
