//! `fano`: entropy exchange and quantum Fano-type bounds from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 input validation failure,
//! 3 property violation (including closed-form/simulation disagreement).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use fano_core::bounds::{full_report, qfi_bound, BoundParameters, BoundReport};
use fano_core::channel_spec::load_channel;
use fano_core::optimize::{optimize_gamma, optimize_gamma_xi, DEFAULT_MAX_ITER, JOINT_MAX_ROUNDS};
use fano_core::quantum::{KrausChannel, ProbabilityVector};
use fano_core::sweep::{run_sweep, write_csv, SweepConfig};
use fano_core::verify::{run_verify, VerifyConfig};
use fano_core::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "fano",
    version,
    about = "Entropy exchange and quantum Fano-type bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every bound for a channel spec and input spectrum.
    Bounds(BoundsArgs),
    /// Depolarizing-channel sweep over p in [0, 1], written as CSV.
    Sweep(SweepArgs),
    /// Tighten the bound over gamma (and optionally xi).
    Optimize(OptimizeArgs),
    /// Run the randomized property suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct StateArgs {
    /// JSON channel spec: {"d": 2, "kraus": [[[[re, im], ...], ...], ...]}
    #[arg(long)]
    spec: PathBuf,
    /// Input spectrum λ as a comma-separated list of length d.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    lambda: Vec<f64>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Free probability vector γ (defaults to uniform).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma: Option<Vec<f64>>,
    /// Free probability vector ξ (defaults to uniform).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    xi: Option<Vec<f64>>,
    /// Replace γ by the optimizer's γ* before evaluating.
    #[arg(long, conflicts_with = "gamma")]
    optimize_gamma: bool,
    /// Also write the report as CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Weight of the first eigenvalue of the qubit input state.
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 101)]
    p_steps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Optimize ξ jointly with γ (alternating minimization of the ξ-bound).
    #[arg(long)]
    joint: bool,
    /// Output path (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    dims: Vec<usize>,
    /// Use this channel for every channel-dependent property.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output path for the report (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An error together with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: anyhow::Error) -> Self {
        Self {
            code: EXIT_USAGE,
            error,
        }
    }

    fn input(error: anyhow::Error) -> Self {
        Self {
            code: EXIT_INPUT,
            error,
        }
    }

    fn violation(error: anyhow::Error) -> Self {
        Self {
            code: EXIT_VIOLATION,
            error,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ClosedFormMismatch(_) | Error::Invariant(_) => Self::violation(e.into()),
            other => Self::input(other.into()),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn open_output(path: Option<&Path>) -> std::result::Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let file = File::create(p)
                .with_context(|| format!("cannot create {}", p.display()))
                .map_err(Failure::input)?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn io_failure(e: io::Error) -> Failure {
    Failure::input(anyhow!(e).context("write failed"))
}

fn check_tol(tol: f64) -> CmdResult {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Failure::usage(anyhow!(
            "--tol must be a positive number, got {tol}"
        )))
    }
}

fn probability(name: &str, values: Vec<f64>) -> std::result::Result<ProbabilityVector, Failure> {
    ProbabilityVector::new(values)
        .with_context(|| format!("--{name}"))
        .map_err(Failure::input)
}

fn load_state(args: &StateArgs) -> std::result::Result<(KrausChannel, ProbabilityVector), Failure> {
    let channel = load_channel(&args.spec)
        .with_context(|| format!("loading channel spec {}", args.spec.display()))
        .map_err(Failure::input)?;
    let lambda = probability("lambda", args.lambda.clone())?;
    if lambda.len() != channel.dim() {
        return Err(Failure::input(anyhow!(
            "--lambda has {} entries but the channel acts on dimension {}",
            lambda.len(),
            channel.dim()
        )));
    }
    Ok((channel, lambda))
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.10}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_report(report: &BoundReport, out: &mut dyn Write) -> io::Result<()> {
    let p = &report.parameters;
    writeln!(out, "{:<18} {}", "d", report.dim)?;
    writeln!(out, "{:<18} {:.12}", "fidelity", report.fidelity)?;
    writeln!(
        out,
        "{:<18} {:.12}",
        "entropy_exchange", report.entropy_exchange
    )?;
    for (name, value) in report.bounds() {
        match value {
            Some(v) => writeln!(out, "{name:<18} {v:.12}")?,
            None => writeln!(out, "{name:<18} n/a (ancilla state is singular)")?,
        }
    }
    writeln!(out, "{:<18} [{}]", "gamma", fmt_vec(&p.gamma))?;
    writeln!(out, "{:<18} [{}]", "xi", fmt_vec(&p.xi))?;
    writeln!(out, "{:<18} {:.12}", "beta_max", p.beta_max)?;
    writeln!(out, "{:<18} {:.12}", "beta_min", p.beta_min)?;
    writeln!(out, "{:<18} {:.3e}", "worst_slack", report.worst_slack())?;
    Ok(())
}

fn report_csv(report: &BoundReport, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "quantity,value")?;
    writeln!(out, "fidelity,{:.16e}", report.fidelity)?;
    writeln!(out, "entropy_exchange,{:.16e}", report.entropy_exchange)?;
    for (name, value) in report.bounds() {
        match value {
            Some(v) => writeln!(out, "{name},{v:.16e}")?,
            None => writeln!(out, "{name},")?,
        }
    }
    Ok(())
}

fn cmd_bounds(args: BoundsArgs) -> CmdResult {
    check_tol(args.tol)?;
    let (channel, lambda) = load_state(&args.state)?;
    let mut params = BoundParameters::default();
    if let Some(g) = args.gamma {
        params.gamma = Some(probability("gamma", g)?);
    }
    if let Some(x) = args.xi {
        params.xi = Some(probability("xi", x)?);
    }
    if args.optimize_gamma {
        let base = full_report(&lambda, &channel, &params)?;
        let opt = optimize_gamma(&lambda, base.fidelity, base.dim, args.tol, DEFAULT_MAX_ITER)?;
        params.gamma = Some(opt.gamma_star);
    }
    let report = full_report(&lambda, &channel, &params)?;

    let mut stdout = io::stdout().lock();
    render_report(&report, &mut stdout).map_err(io_failure)?;
    if let Some(path) = args.out.as_deref() {
        let mut out = open_output(Some(path))?;
        report_csv(&report, &mut out).map_err(io_failure)?;
        out.flush().map_err(io_failure)?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> CmdResult {
    check_tol(args.tol)?;
    if args.p_steps < 2 {
        return Err(Failure::usage(anyhow!("--p-steps must be at least 2")));
    }
    let rows = run_sweep(&SweepConfig {
        lambda: args.lambda,
        p_steps: args.p_steps,
        seed: args.seed,
        tol: args.tol,
    })?;
    let out = open_output(args.out.as_deref())?;
    write_csv(&rows, out)?;
    Ok(())
}

fn cmd_optimize(args: OptimizeArgs) -> CmdResult {
    check_tol(args.tol)?;
    let (channel, lambda) = load_state(&args.state)?;
    let base = full_report(&lambda, &channel, &BoundParameters::default())?;
    let (d, f) = (base.dim, base.fidelity);
    let qfi = qfi_bound(f, d)?;
    let mut out = open_output(args.out.as_deref())?;

    let opt = optimize_gamma(&lambda, f, d, args.tol, DEFAULT_MAX_ITER)?;
    let mut lines = vec![
        format!("{:<18} {:.12}", "fidelity", f),
        format!("{:<18} {:.12}", "entropy_exchange", base.entropy_exchange),
        format!("{:<18} {:.12}", "qfi", qfi),
        format!("{:<18} {:.12}", "ineq4_opt", opt.bound_star),
        format!("{:<18} [{}]", "gamma_star", fmt_vec(&opt.gamma_star)),
        format!("{:<18} {:.3e}", "improvement", qfi - opt.bound_star),
        format!(
            "{:<18} {} ({})",
            "iterations",
            opt.iterations,
            if opt.converged {
                "converged"
            } else {
                "iteration cap"
            }
        ),
    ];
    if args.joint {
        let joint = optimize_gamma_xi(&lambda, f, args.tol, JOINT_MAX_ROUNDS)?;
        lines.extend([
            format!("{:<18} {:.12}", "ineq3_opt", joint.bound_star),
            format!(
                "{:<18} [{}]",
                "joint_gamma_star",
                fmt_vec(&joint.gamma_star)
            ),
            format!("{:<18} [{}]", "joint_xi_star", fmt_vec(&joint.xi_star)),
            format!(
                "{:<18} {} ({})",
                "rounds",
                joint.rounds,
                if joint.converged {
                    "converged"
                } else {
                    "round cap"
                }
            ),
        ]);
    }
    for line in lines {
        writeln!(out, "{line}").map_err(io_failure)?;
    }
    out.flush().map_err(io_failure)?;
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    if args.trials == 0 {
        return Err(Failure::usage(anyhow!("--trials must be at least 1")));
    }
    if args.dims.is_empty() || args.dims.iter().any(|&d| d < 2) {
        return Err(Failure::usage(anyhow!("--dims entries must be at least 2")));
    }
    let channel = match &args.spec {
        Some(path) => Some(
            load_channel(path)
                .with_context(|| format!("loading channel spec {}", path.display()))
                .map_err(Failure::input)?,
        ),
        None => None,
    };
    let report = run_verify(&VerifyConfig {
        seed: args.seed,
        trials: args.trials,
        dims: args.dims.clone(),
        channel,
    })?;

    let mut out = open_output(args.out.as_deref())?;
    let mut failures = 0;
    for (index, o) in report.outcomes.iter().enumerate() {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{status} {:<38} trials={:<5} worst_margin={:+.3e} tol={:.0e}",
            o.name, o.trials, o.worst_margin, o.tolerance
        )
        .map_err(io_failure)?;
        if let Some(fail) = &o.failure {
            failures += 1;
            let detail = if fail.detail.is_empty() {
                String::new()
            } else {
                format!(" ({})", fail.detail)
            };
            writeln!(
                out,
                "     seed={} trial={} stream={} margin={:+.3e}{detail}",
                report.seed,
                fail.trial,
                ((index as u64) << 32) | fail.trial as u64,
                fail.margin
            )
            .map_err(io_failure)?;
        }
    }
    out.flush().map_err(io_failure)?;
    if failures > 0 {
        return Err(Failure::violation(anyhow!(
            "{failures} propert{} violated; rerun with --seed {} to reproduce",
            if failures == 1 { "y" } else { "ies" },
            report.seed
        )));
    }
    Ok(())
}
