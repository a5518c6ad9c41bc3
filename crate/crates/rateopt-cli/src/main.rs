//! `rateopt`: closed-form relay power allocation with brute-force and
//! Monte Carlo verification.
//!
//! Exit codes: 0 success, 2 configuration/usage error, 3 weights too skewed
//! for the budget, 4 target SNRs unachievable, 5 verification FAIL.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod report;

use commands::{cmd_solve, cmd_sweep, cmd_verify, CommandError};
use config::{parse_scenario_file, ConfigError, Overrides, ScenarioConfig, ScenarioFile};

#[derive(Parser)]
#[command(
    name = "rateopt",
    about = "Closed-form weighted sum-rate / common-rate power allocation for a \
             two-way multi-antenna relay, with grid-search verification and \
             Monte Carlo sweeps",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form solve: powers, SNRs, and rate for the configured mode
    /// (JSON report).
    Solve(CommonArgs),
    /// Closed form against exhaustive (alpha, beta) grid search; exits 5 on
    /// disagreement (JSON report).
    Verify(CommonArgs),
    /// Monte Carlo mean-rate sweep over a budget grid (CSV).
    Sweep(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON scenario file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// common-rate | weighted-sum | framework
    #[arg(long)]
    mode: Option<String>,
    /// Weight of user 1's rate (weighted-sum mode).
    #[arg(long)]
    a1: Option<f64>,
    /// Weight of user 2's rate (weighted-sum mode).
    #[arg(long)]
    a2: Option<f64>,
    /// Effective gain Pt*|h1|^2/sigma^2 (explicit channel).
    #[arg(long)]
    gamma1r: Option<f64>,
    /// Effective gain Pt*|h2|^2/sigma^2 (explicit channel).
    #[arg(long)]
    gamma2r: Option<f64>,
    /// Relay antenna count.
    #[arg(long)]
    nr: Option<usize>,
    /// Per-antenna fading variance of h1 (fading channel).
    #[arg(long)]
    var1: Option<f64>,
    /// Per-antenna fading variance of h2 (fading channel).
    #[arg(long)]
    var2: Option<f64>,
    /// AWGN variance, common to relay and users.
    #[arg(long)]
    sigma2: Option<f64>,
    /// Total power budget in dB: Pt = 10^(pt_db/10) watts.
    #[arg(long = "pt-db")]
    pt_db: Option<f64>,
    /// Grid-search step in (0, 1].
    #[arg(long)]
    step: Option<f64>,
    /// Monte Carlo trials per budget point.
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed for channel draws.
    #[arg(long)]
    seed: Option<u64>,
    /// Rate pre-log factor.
    #[arg(long)]
    prelog: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Test hook: scale the closed-form result to force failure paths.
    #[arg(long, hide = true)]
    corrupt: Option<f64>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            mode: self.mode.clone(),
            a1: self.a1,
            a2: self.a2,
            gamma1r: self.gamma1r,
            gamma2r: self.gamma2r,
            nr: self.nr,
            var1: self.var1,
            var2: self.var2,
            sigma2: self.sigma2,
            pt_db: self.pt_db,
            step: self.step,
            trials: self.trials,
            seed: self.seed,
            prelog: self.prelog,
        }
    }

    fn scenario(&self) -> Result<ScenarioConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    ConfigError(format!("config {}: {e}", path.display()))
                })?;
                parse_scenario_file(&text)?
            }
            None => ScenarioFile::default(),
        };
        ScenarioConfig::resolve(file, &self.overrides())
    }
}

fn init_thread_pool() -> Result<(), ConfigError> {
    match std::env::var("RATEOPT_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .map_err(|_| ConfigError(format!("RATEOPT_THREADS: not a count: {raw:?}")))?;
            if n == 0 {
                return Ok(()); // 0 = automatic
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| ConfigError(format!("RATEOPT_THREADS: {e}")))
        }
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), ConfigError> {
    match out {
        Some(path) => fs::write(path, body)
            .map_err(|e| ConfigError(format!("out {}: {e}", path.display()))),
        None => {
            if body.ends_with('\n') {
                print!("{body}");
            } else {
                println!("{body}");
            }
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), (i32, String)> {
    init_thread_pool().map_err(|e| (2, e.to_string()))?;

    let (args, body) = match &cli.command {
        Command::Solve(args) => {
            let scenario = args.scenario().map_err(|e| (2, e.to_string()))?;
            let body = cmd_solve(&scenario, args.corrupt)
                .map_err(|e| (e.exit_code(), e.to_string()))?;
            (args, body)
        }
        Command::Verify(args) => {
            let scenario = args.scenario().map_err(|e| (2, e.to_string()))?;
            match cmd_verify(&scenario, args.corrupt) {
                Ok(body) => (args, body),
                Err(CommandError::VerifyFailed { report }) => {
                    // The FAIL report still goes to the requested sink; the
                    // exit code carries the verdict.
                    let _ = emit(&args.out, &report);
                    return Err((5, "verification FAIL".into()));
                }
                Err(e) => return Err((e.exit_code(), e.to_string())),
            }
        }
        Command::Sweep(args) => {
            let scenario = args.scenario().map_err(|e| (2, e.to_string()))?;
            let body = cmd_sweep(&scenario).map_err(|e| (e.exit_code(), e.to_string()))?;
            (args, body)
        }
    };
    emit(&args.out, &body).map_err(|e| (2, e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
