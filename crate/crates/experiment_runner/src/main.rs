//! pe-lab: command line front end for the primitive-equation laboratory.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use experiment_runner::{
    compare_trajectories, error_exit_code, execute_run, execute_sweep, load_compare_config,
    load_run_snapshots, load_sim_config, load_verify_config, outcome_exit_code, write_compare_outputs,
    write_run_outputs, write_sweep_outputs, RunOutcome, RunnerError, SimConfig,
};
use lemma_verifier::EnsembleSpec;

#[derive(Parser)]
#[command(
    name = "pe-lab",
    about = "Pseudo-spectral laboratory for the rotating inviscid primitive equations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides output_dir from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads. Accepted for interface stability; execution is
    /// sequential and results do not depend on this value.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Print progress details.
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and write its diagnostics time series.
    Run(CommonArgs),
    /// Execute a parameter sweep scenario and write its table.
    Sweep(CommonArgs),
    /// Compare two snapshot-recorded runs in a weighted norm.
    Compare(CommonArgs),
    /// Run the random-ensemble identity and estimate verification suite.
    VerifyLemmas(CommonArgs),
    /// Validate a config and print derived quantities without running.
    Info(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Run(args) => dispatch(args, cmd_run),
        Command::Sweep(args) => dispatch(args, cmd_sweep),
        Command::Compare(args) => dispatch(args, cmd_compare),
        Command::VerifyLemmas(args) => dispatch(args, cmd_verify),
        Command::Info(args) => dispatch(args, cmd_info),
    };
    ExitCode::from(code as u8)
}

fn dispatch(args: &CommonArgs, f: fn(&CommonArgs) -> Result<i32, RunnerError>) -> i32 {
    if args.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return 2;
    }
    if args.threads > 1 && args.verbose {
        println!("note: execution is sequential; --threads {} has no effect", args.threads);
    }
    match f(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}

fn output_dir(args: &CommonArgs, config: &SimConfig) -> PathBuf {
    args.out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("pe-lab-out"))
}

fn plain_output_dir(args: &CommonArgs) -> PathBuf {
    args.out.clone().unwrap_or_else(|| PathBuf::from("pe-lab-out"))
}

fn cmd_run(args: &CommonArgs) -> Result<i32, RunnerError> {
    let config = load_sim_config(&args.config)?;
    let dir = output_dir(args, &config);
    if args.verbose {
        println!(
            "run: scenario {} on n = {} up to t = {}",
            config.scenario.id(),
            config.n,
            config.t_end
        );
    }
    let snapshot_dir = if config.snapshots {
        let d = dir.join("snapshots");
        std::fs::create_dir_all(&d)?;
        Some(d)
    } else {
        None
    };
    let result = execute_run(&config, snapshot_dir.as_deref())?;
    write_run_outputs(&dir, &config, &result)?;
    match &result.outcome {
        RunOutcome::Completed => {
            println!(
                "run complete: {} records written to {}",
                result.records.len(),
                dir.display()
            );
        }
        RunOutcome::BlowupTerminated {
            t,
            criterion,
            value,
        } => {
            println!(
                "run terminated by the blowup monitor at t = {t:.6} ({criterion} = {value:.3e}); \
                 {} records written to {}",
                result.records.len(),
                dir.display()
            );
        }
    }
    Ok(outcome_exit_code(&result.outcome))
}

fn cmd_sweep(args: &CommonArgs) -> Result<i32, RunnerError> {
    let config = load_sim_config(&args.config)?;
    let dir = output_dir(args, &config);
    if args.verbose {
        println!(
            "sweep: scenario {} on n = {} up to t = {}",
            config.scenario.id(),
            config.n,
            config.t_end
        );
    }
    let result = execute_sweep(&config)?;
    write_sweep_outputs(&dir, &config, &result)?;
    println!(
        "sweep complete: {} rows written to {}",
        result.rows.len(),
        dir.display()
    );
    for row in &result.rows {
        let cells: Vec<String> = result
            .columns
            .iter()
            .zip(row.iter())
            .map(|(c, v)| format!("{c} = {v:.6e}"))
            .collect();
        println!("  {}", cells.join(", "));
    }
    Ok(0)
}

fn cmd_compare(args: &CommonArgs) -> Result<i32, RunnerError> {
    let config = load_compare_config(&args.config)?;
    let spec = config.norm_spec()?;
    let a = load_run_snapshots(Path::new(&config.run_a))?;
    let b = load_run_snapshots(Path::new(&config.run_b))?;
    if args.verbose {
        println!(
            "compare: {} records from {} vs {} records from {}",
            a.len(),
            config.run_a.display(),
            b.len(),
            config.run_b.display()
        );
    }
    let records = compare_trajectories(&a, &b, &spec)?;
    let rows: Vec<Vec<f64>> = records.iter().map(|r| r.row()).collect();
    let dir = plain_output_dir(args);
    let echo = serde_json::to_value(&config)
        .map_err(|e| RunnerError::Config(format!("config serialization: {e}")))?;
    write_compare_outputs(&dir, echo, &rows)?;
    let worst = records
        .iter()
        .map(|r| r.bar_diff.max(r.tilde_diff))
        .fold(0.0f64, f64::max);
    println!(
        "compare complete: {} records, largest difference {worst:.3e}, written to {}",
        records.len(),
        dir.display()
    );
    Ok(0)
}

fn cmd_verify(args: &CommonArgs) -> Result<i32, RunnerError> {
    let config = load_verify_config(&args.config)?;
    let mut spec = EnsembleSpec::standard(config.n, config.samples, config.seed);
    if let Some(cap) = config.mode_cap {
        spec.mode_cap = cap;
    }
    if let Some(decay) = config.decay {
        spec.decay = decay;
    }
    spec.validate()
        .map_err(|e| RunnerError::Config(format!("ensemble: {e}")))?;

    let report = lemma_verifier::full_verification(&spec)
        .map_err(|e| RunnerError::Numerical(format!("verification: {e}")))?;
    println!(
        "identity suite: {} identities on {} samples (n = {})",
        report.identities.len(),
        spec.samples,
        spec.n
    );
    for id in &report.identities {
        println!("  {:<32} max residual {:.3e}", id.identity, id.max_residual);
    }
    println!("estimate suite: {} checks", report.estimates.len());
    for est in &report.estimates {
        println!(
            "  {:<32} r = {:.2} tau = {:.2} max ratio {:.4e}",
            est.check, est.r, est.tau, est.max_ratio
        );
    }

    if config.compare_refined {
        let refined = lemma_verifier::standard_estimates(&spec.refined())
            .map_err(|e| RunnerError::Numerical(format!("refined verification: {e}")))?;
        let mut worst = 0.0f64;
        for (c, f) in report.estimates.iter().zip(refined.iter()) {
            let scale = c.max_ratio.abs().max(1e-300);
            worst = worst.max((c.max_ratio - f.max_ratio).abs() / scale);
        }
        println!(
            "refinement check: largest relative ratio deviation on the doubled grid {worst:.3e}"
        );
    }

    let dir = plain_output_dir(args);
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("verify_report.json"), report.to_json())?;
    println!("report written to {}", dir.join("verify_report.json").display());
    Ok(0)
}

fn cmd_info(args: &CommonArgs) -> Result<i32, RunnerError> {
    let config = load_sim_config(&args.config)?;
    println!("config {} is valid", args.config.display());
    println!("  scenario: {}", config.scenario.id());
    println!("  grid: n = {}, dealiased band {}", config.n, spectral_core::band_limit(config.n));
    println!("  omega = {}, t_end = {}", config.omega, config.t_end);
    match config.dt {
        Some(dt) => println!("  dt = {dt} (explicit)"),
        None => println!("  dt chosen automatically from the initial data"),
    }
    println!(
        "  norms reported at r = {}, tau = {}",
        config.norm_r, config.norm_tau
    );
    if let experiment_runner::Scenario::WellPrepared { tau0, r } = &config.scenario {
        let (_, report) = experiment_runner::well_prepared_state(
            config.n,
            config.omega,
            *tau0,
            *r,
            experiment_runner::config::DEFAULT_MEAN_AMPLITUDE,
        )?;
        println!(
            "  rotation-adapted data: mode {} amplitude {:.6e}",
            report.mode, report.amplitude
        );
    }
    if args.verbose {
        let echo = serde_json::to_string_pretty(&config)
            .map_err(|e| RunnerError::Config(format!("config serialization: {e}")))?;
        println!("{echo}");
    }
    Ok(0)
}
