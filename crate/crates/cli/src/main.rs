//! `lmoments`: command-line front end.
//!
//! Exit codes: 0 success, 1 computation error (or a failed verify suite),
//! 2 usage error.

mod cache;
mod commands;
mod config;
mod manifest;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] lmoments::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    /// A verify suite ran to completion but some check failed.
    #[error("suite '{0}' failed")]
    SuiteFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lmoments", version, about = "Moments and value distribution of L-functions on the critical line")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// key=value file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Grid cache directory.
    #[arg(long, global = true, env = "LMOMENTS_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Record wall times in moment records.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate log|L(½+it)| on a uniform grid (CSV).
    Eval(EvalArgs),
    /// Joint moments ∫ ∏|L_j|^{2k_j} (JSON lines, one per T).
    Moment(MomentArgs),
    /// Fit log(I/T) against log log T.
    Fit(MomentArgs),
    /// Windowed integrals H, K, J at one σ.
    Windowed(WindowedArgs),
    /// Audit of the prime-sum majorant for log|L|.
    Chandee(ChandeeArgs),
    /// Prime-block schedule and good/bad set classification.
    #[command(subcommand)]
    Harper(HarperCommand),
    /// Run a seeded check suite.
    Verify(VerifyArgs),
    /// Distribution of log|L(½+it)|.
    #[command(subcommand)]
    Dist(DistCommand),
    /// Hurwitz decomposition and twisted moments.
    #[command(subcommand)]
    Hurwitz(HurwitzCommand),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub lfunc: Option<String>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub precision: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    /// Selector, e.g. `zeta^2` or `zeta,dirichlet:4:1`.
    #[arg(long)]
    pub lfunc: Option<String>,
    /// Exponents, overriding the `^k` suffixes.
    #[arg(long)]
    pub k: Option<String>,
    /// One or more heights, comma separated.
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub step: Option<f64>,
    /// sharp | gaussian
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub precision: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WindowedArgs {
    #[arg(long)]
    pub lfunc: Option<String>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChandeeArgs {
    #[arg(long)]
    pub lfunc: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    /// Prime-sum length (default T^0.1).
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long)]
    pub lfunc: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Use the asymptotic schedule (empty at any feasible T).
    #[arg(long)]
    pub asymptotic: bool,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum HarperCommand {
    Schedule(ScheduleArgs),
    Classify(ScheduleArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// hurwitz, half-shift, known-values, truncation, mv, coprime,
    /// highmoment, partial-sums, scaling, clt, joint, fubini, chandee, gabriel
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long)]
    pub lfunc: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    /// full ([1, T]) | dyadic ([T, 2T])
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub v_step: Option<f64>,
    /// Thresholds V (phi, joint), one per L-function.
    #[arg(long)]
    pub v: Option<String>,
    /// Multiples c with V = c √(log log T) (ldp).
    #[arg(long)]
    pub c: Option<String>,
    /// Exponents (fubini).
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DistCommand {
    Phi(DistArgs),
    Clt(DistArgs),
    Joint(DistArgs),
    Ldp(DistArgs),
    Fubini(DistArgs),
}

#[derive(Debug, Args)]
pub struct HurwitzArgs {
    #[arg(long)]
    pub a: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sample points (identity).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum HurwitzCommand {
    Identity(HurwitzArgs),
    Twisted(HurwitzArgs),
}

/// Every long flag name of every subcommand: the keys a config file may use.
pub fn known_keys() -> BTreeSet<String> {
    fn walk(c: &clap::Command, out: &mut BTreeSet<String>) {
        for a in c.get_arguments() {
            if let Some(l) = a.get_long() {
                out.insert(l.to_string());
            }
        }
        for s in c.get_subcommands() {
            walk(s, out);
        }
    }
    let mut out = BTreeSet::new();
    walk(&Cli::command(), &mut out);
    for k in ["config", "help", "version"] {
        out.remove(k);
    }
    out
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lmoments: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
