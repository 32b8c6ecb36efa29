//! `twoqubit`: negativity queries, figure surfaces, verification suites and
//! the formula discrepancy report.
//!
//! Exit codes: 0 success, 1 a check failed, 2 invalid input or
//! configuration, 3 a file could not be read or written.

mod input;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twoqubit::entanglement::{discrepancy, negativity_oracle, DiscrepancyPoint, ObservableVector};
use twoqubit::evolution::InitialState;
use twoqubit::figures::calibrate_time_scale;
use twoqubit::figures::{scaled_time_grid, sweep_surface_with_kappa, theta_grid, Figure};
use twoqubit::report::discrepancy_report;
use twoqubit::sampling::DEFAULT_SEED;
use twoqubit::spin::HamiltonianParams;
use twoqubit::states::classify_family;
use twoqubit::verify::{run_suite, Suite, SuiteOptions};

use input::{
    check_steps, check_tol, load_state, parse_assignment, set_param, CliError, CliResult, RunConfig,
};

const DEFAULT_STEPS: usize = 101;
const DEFAULT_REPORT_SAMPLES: usize = 100;

#[derive(Debug, Parser)]
#[command(
    name = "twoqubit",
    version,
    about = "Two-qubit negativity from spin observables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Negativity of a state given as JSON.
    Negativity(NegativityArgs),
    /// Sample one figure's negativity surface to CSV.
    Surface(SurfaceArgs),
    /// Run a verification suite and print a per-claim table.
    Verify(VerifyArgs),
    /// Compare the printed formulas against the oracle.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NegativityArgs {
    /// JSON state specification.
    #[arg(long)]
    state: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    theta_steps: Option<usize>,
    #[arg(long)]
    time_steps: Option<usize>,
    /// Hamiltonian parameter override, e.g. `--param g2=0.3`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Debug, Args)]
struct SurfaceArgs {
    #[arg(long)]
    figure: Option<u8>,
    /// Which mixed initial state of a two-state figure (5–8).
    #[arg(long)]
    member: Option<u8>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// closed_forms, observable_relations, invariance, conservation, figures or all.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replaces every claim's default tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random points per family.
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    common: Common,
}

fn load_config(common: &Common) -> CliResult<RunConfig> {
    match &common.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn lib_err(e: twoqubit::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_err(path, e))
}

fn hamiltonian_params(cfg: &RunConfig, overrides: &[String]) -> CliResult<HamiltonianParams> {
    let mut params = Figure::default_params();
    for (key, &value) in &cfg.params {
        set_param(&mut params, key, value)?;
    }
    for s in overrides {
        let (key, value) = parse_assignment(s)?;
        set_param(&mut params, &key, value)?;
    }
    Ok(params)
}

fn steps(flag: Option<usize>, cfg: Option<usize>) -> CliResult<usize> {
    check_steps(flag.or(cfg).unwrap_or(DEFAULT_STEPS))
}

fn cmd_negativity(args: &NegativityArgs) -> CliResult<()> {
    let cfg = load_config(&args.common)?;
    let path = args
        .state
        .as_ref()
        .or(cfg.state.as_ref())
        .ok_or_else(|| CliError::Config("negativity needs --state <file>".into()))?;
    let initial = load_state(path)?;
    let rho = initial.density_matrix().map_err(lib_err)?;
    let obs = ObservableVector::from_state(&rho).map_err(lib_err)?;
    let oracle = negativity_oracle(&rho).map_err(lib_err)?;
    println!("oracle     {oracle:.12}");
    if let InitialState::Family(p) = &initial {
        let record =
            discrepancy(p.to_string(), DiscrepancyPoint::ClosedForm(p)).map_err(lib_err)?;
        println!("printed    {:.12}", record.printed_value);
        println!("corrected  {:.12}", record.corrected_value);
        println!("deviation  {:.12}", record.abs_deviation_printed);
    }
    println!(
        "<s11> {:.12}  <s12> {:.12}  <S_z> {:.12}  <S^2> {:.12}",
        obs.s11, obs.s12, obs.sz, obs.s2
    );
    let families: Vec<String> = classify_family(&rho, 1e-10)
        .iter()
        .map(|m| m.family.to_string())
        .collect();
    println!(
        "families   {}",
        if families.is_empty() {
            "none".to_string()
        } else {
            families.join(", ")
        }
    );
    Ok(())
}

fn cmd_surface(args: &SurfaceArgs) -> CliResult<()> {
    let cfg = load_config(&args.common)?;
    let id = args
        .figure
        .or(cfg.figure)
        .ok_or_else(|| CliError::Config("surface needs --figure <1..8>".into()))?;
    let fig = Figure::new(id, args.member.or(cfg.member)).map_err(lib_err)?;
    let params = hamiltonian_params(&cfg, &args.grid.params)?;
    let theta_steps = steps(args.grid.theta_steps, cfg.theta_steps)?;
    let time_steps = steps(args.grid.time_steps, cfg.time_steps)?;
    let out = args
        .out
        .as_ref()
        .or(cfg.out.as_ref())
        .ok_or_else(|| CliError::Config("surface needs --out <file.csv>".into()))?;

    let cal = calibrate_time_scale(&fig, &params).map_err(lib_err)?;
    let thetas = theta_grid(theta_steps).map_err(lib_err)?;
    let times = scaled_time_grid(cal.kappa, time_steps).map_err(lib_err)?;
    let samples =
        sweep_surface_with_kappa(&fig, &params, &thetas, &times, cal.kappa).map_err(lib_err)?;

    let mut w = create(out)?;
    let write = |w: &mut BufWriter<File>| -> io::Result<()> {
        writeln!(
            w,
            "theta,time,T,Sz,S2,s11,s12,N_oracle,N_printed,N_corrected"
        )?;
        for s in &samples {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.theta,
                s.time,
                s.scaled_time,
                s.obs.sz,
                s.obs.s2,
                s.obs.s11,
                s.obs.s12,
                s.n_oracle,
                s.n_printed,
                s.n_corrected
            )?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(out, e))?;
    let off_family = samples.iter().filter(|s| !s.in_family).count();
    println!(
        "{fig}: kappa {:.12}, gamma {}, {} samples ({off_family} off-family) written to {}",
        cal.kappa,
        cal.gamma,
        samples.len(),
        out.display()
    );
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    let cfg = load_config(&args.common)?;
    let suite: Suite = args
        .suite
        .as_deref()
        .or(cfg.suite.as_deref())
        .unwrap_or("all")
        .parse()
        .map_err(lib_err)?;
    let trials = args.trials.or(cfg.trials);
    if trials == Some(0) {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    let opts = SuiteOptions {
        trials,
        seed: args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
        tol: args.tol.or(cfg.tol).map(check_tol).transpose()?,
        params: hamiltonian_params(&cfg, &args.grid.params)?,
        theta_steps: steps(args.grid.theta_steps, cfg.theta_steps)?,
        time_steps: steps(args.grid.time_steps, cfg.time_steps)?,
    };
    let reports = run_suite(suite, &opts).map_err(lib_err)?;

    let width = reports
        .iter()
        .map(|r| r.claim.len())
        .max()
        .unwrap_or(5)
        .max(5);
    println!(
        "{:<width$}  {:>7}  {:>10}  {:>8}  result",
        "claim", "trials", "max error", "tol"
    );
    for r in &reports {
        println!(
            "{:<width$}  {:>7}  {:>10.3e}  {:>8.1e}  {}",
            r.claim,
            r.trials,
            r.max_abs_error,
            r.tolerance,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        println!("\n{} ({} failing points):", r.claim, r.failure_count);
        for f in &r.failures {
            println!("  {:.3e}  {}", f.error, f.point);
        }
    }
    println!(
        "\nsuite {} seed {}: {} of {} claims pass",
        suite.name(),
        opts.seed,
        reports.len() - failed.len(),
        reports.len()
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} claims failed", failed.len())))
    }
}

fn cmd_report(args: &ReportArgs) -> CliResult<()> {
    let cfg = load_config(&args.common)?;
    let out = args
        .out
        .as_ref()
        .or(cfg.out.as_ref())
        .ok_or_else(|| CliError::Config("report needs --out <file>".into()))?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let samples = args
        .samples
        .or(cfg.samples)
        .unwrap_or(DEFAULT_REPORT_SAMPLES);
    let report = discrepancy_report(seed, samples).map_err(lib_err)?;
    let mut w = create(out)?;
    report
        .write_csv(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| io_err(out, e))?;
    report
        .write_summary(io::stdout().lock())
        .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
    if report.matches_documented() {
        Ok(())
    } else {
        Err(CliError::Failed(
            "flagged checks differ from the documented inconsistencies".into(),
        ))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Negativity(a) => cmd_negativity(a),
        Command::Surface(a) => cmd_surface(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(1),
    }
}
