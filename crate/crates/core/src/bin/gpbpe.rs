//! Command-line benchmark harness.
//!
//! Subcommands: `run` executes an experiment from a config file, `schedule`
//! prints batch-length sequences, `diag` prints information-gain reports,
//! and `selftest` runs the reduced-scale property suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 configuration error,
//! 3 runtime/numerical error.

use clap::{Args, Parser, Subcommand};
use gpbpe::error::Error;
use gpbpe::harness;
use gpbpe::{diag, env, schedule, selftest, KernelSpec};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gpbpe", version, about = "Batched GP bandit benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment described by a key=value config file.
    Run(RunArgs),
    /// Print a batch-length schedule as a comma-separated list.
    Schedule(ScheduleArgs),
    /// Information-gain diagnostics.
    Diag(DiagArgs),
    /// Run the reduced-scale property suite.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the experiment config.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct ScheduleArgs {
    /// Time horizon.
    #[arg(long = "T")]
    t: usize,
    /// Schedule family: orig, const-se, const-matern, fixed.
    #[arg(long)]
    kind: String,
    /// Number of batches (constant-batch and fixed schedules).
    #[arg(long = "B")]
    b: Option<usize>,
    /// Matérn smoothness for const-matern.
    #[arg(long, default_value_t = 2.5)]
    nu: f64,
    /// Input dimension entering the schedule exponents.
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Rescale lengths to sum to the horizon (drops the SE log factor).
    #[arg(long, default_value_t = false)]
    normalize: bool,
}

#[derive(Args)]
struct DiagArgs {
    /// Print the maximum-information-gain report.
    #[arg(long)]
    gamma: bool,
    /// Kernel family: se or matern.
    #[arg(long, default_value = "se")]
    kernel: String,
    #[arg(long, default_value_t = 0.5)]
    lengthscale: f64,
    #[arg(long, default_value_t = 2.5)]
    nu: f64,
    /// Grid dimension.
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Grid points per axis over [0, 1].
    #[arg(long = "per-axis", default_value_t = 16)]
    per_axis: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Largest sample count to report.
    #[arg(long = "t-max", default_value_t = 10)]
    t_max: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error too
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn dispatch(cli: Cli) -> gpbpe::Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Schedule(args) => cmd_schedule(args),
        Command::Diag(args) => cmd_diag(args),
        Command::Selftest => cmd_selftest(),
    }
}

fn cmd_run(args: RunArgs) -> gpbpe::Result<()> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        Error::Config(format!(
            "cannot read config file {}: {e}",
            args.config.display()
        ))
    })?;
    let config = harness::parse_config(&text)?;
    eprintln!(
        "running {} policies x {} trials at T = {}",
        config.policies.len(),
        config.trials,
        config.horizon
    );
    let output = harness::run_experiment(&config)?;
    harness::emit_csv(&output, &config, &config.output_dir)?;
    println!("wrote raw.csv, summary.csv, schedule.txt to {}", config.output_dir.display());
    for name in &output.aggregate.policy_names {
        let final_regret = output
            .aggregate
            .final_mean_regret(name)
            .expect("policy present");
        println!("{name}: mean final cumulative regret {final_regret:.4}");
    }
    Ok(())
}

fn cmd_schedule(args: ScheduleArgs) -> gpbpe::Result<()> {
    let sched = match args.kind.as_str() {
        "orig" => schedule::orig_bpe_schedule(args.t)?,
        "const-se" => {
            let b = require_b(&args)?;
            let kernel = KernelSpec::squared_exponential(1.0, args.d)?;
            schedule::constant_b_schedule(args.t, b, &kernel, args.normalize)?
        }
        "const-matern" => {
            let b = require_b(&args)?;
            let kernel = KernelSpec::matern(1.0, args.nu, args.d)?;
            schedule::constant_b_schedule(args.t, b, &kernel, args.normalize)?
        }
        "fixed" => {
            let b = require_b(&args)?;
            schedule::fixed_equal_schedule(args.t, b)?
        }
        other => {
            return Err(Error::Config(format!(
                "unknown schedule kind '{other}' (expected orig, const-se, const-matern, fixed)"
            )))
        }
    };
    println!("{sched}");
    Ok(())
}

fn require_b(args: &ScheduleArgs) -> gpbpe::Result<usize> {
    args.b.ok_or_else(|| {
        Error::Config(format!("schedule kind '{}' requires --B", args.kind))
    })
}

fn cmd_diag(args: DiagArgs) -> gpbpe::Result<()> {
    if !args.gamma {
        return Err(Error::Config(
            "diag currently provides the --gamma report only".into(),
        ));
    }
    let kernel = match args.kernel.as_str() {
        "se" => KernelSpec::squared_exponential(args.lengthscale, args.d)?,
        "matern" => KernelSpec::matern(args.lengthscale, args.nu, args.d)?,
        other => return Err(Error::Config(format!("unknown kernel family '{other}'"))),
    };
    let domain = env::build_grid(args.d, args.per_axis, 0.0, 1.0);
    let curve = diag::greedy_gain_curve(&kernel, args.lambda, &domain, args.t_max)?;
    print!("{}", diag::InfoGainTable(curve));
    Ok(())
}

fn cmd_selftest() -> gpbpe::Result<()> {
    let outcomes = selftest::run_all();
    let mut failed = 0;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("{status} {} ({})", o.name, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Error::Numerical(format!("{failed} self-checks failed")));
    }
    println!("all {} checks passed", outcomes.len());
    Ok(())
}
