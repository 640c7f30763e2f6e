use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use demjanenko_cli::{
    cmd_cheb, cmd_descent, cmd_hasse_scan, cmd_heights, cmd_orbit, cmd_quartic, render_text, CliError, HasseScanArgs,
    OrbitArgs, Outcome, QuarticArgs, CACHE_ENV,
};

#[derive(Parser)]
#[command(name = "demjanenko", version, about = "Rational points on symmetric quartics and Chebyshev curves")]
struct Cli {
    /// Print the result envelope as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the rational points of x⁴ + a x² + a y² + y⁴ = b, twisted by alpha.
    Quartic {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        alpha: i64,
        /// Generator of the companion curve's free part, as x,y.
        #[arg(long, allow_hyphen_values = true)]
        generator: Option<String>,
        #[arg(long)]
        rank: Option<u8>,
        #[arg(long, default_value_t = 40)]
        min_window: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Rational points of T_d(x) + T_d(y) = 1.
    Cheb { d: u32 },
    /// Verdicts for the primes p ≡ 1 (mod 24) in [lo, hi]; only p ≡ 25 (mod 48) can pass.
    HasseScan {
        lo: u64,
        hi: u64,
        /// Assume the parity conjecture to draw conditional conclusions.
        #[arg(long)]
        assume_parity: bool,
        #[arg(long, env = CACHE_ENV)]
        cache_dir: Option<PathBuf>,
    },
    /// Naive and canonical height of a point on y² = x³ + a2 x² + a4 x + a6.
    Heights {
        /// a2,a4,a6
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// 2-isogeny descent data for the prime twist p.
    Descent { p: u64 },
    /// Orbits of a monic integer polynomial and their shifted intersection.
    Orbit {
        #[arg(long, default_value = "-2,0,1", allow_hyphen_values = true)]
        poly: String,
        /// L(x) = c + m x, written c,m.
        #[arg(long, default_value = "1,-1", allow_hyphen_values = true)]
        shift: String,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value_t = 32)]
        horizon: usize,
        /// Also list preperiodic points, searching |x| up to this bound.
        #[arg(long)]
        preperiodic: Option<u64>,
    },
}

fn run(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Quartic { a, b, alpha, generator, rank, min_window, tol } => cmd_quartic(&QuarticArgs {
            a,
            b,
            alpha,
            generator,
            rank,
            min_window,
            tol,
        }),
        Command::Cheb { d } => cmd_cheb(d),
        Command::HasseScan { lo, hi, assume_parity, cache_dir } => {
            let (outcome, stats) = cmd_hasse_scan(&HasseScanArgs { lo, hi, assume_parity, cache_dir })?;
            eprintln!(
                "cache: {} hits, {} computed, {} rejected entries",
                stats.hits, stats.computed, stats.rejected
            );
            Ok(outcome)
        }
        Command::Heights { curve, point, tol } => cmd_heights(&curve, &point, tol),
        Command::Descent { p } => cmd_descent(p),
        Command::Orbit { poly, shift, start, beta, n, horizon, preperiodic } => cmd_orbit(&OrbitArgs {
            poly,
            shift,
            start,
            beta,
            n,
            horizon,
            preperiodic_cap: preperiodic,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.envelope).expect("envelope serializes"));
            } else {
                print!("{}", render_text(&out.envelope));
            }
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            if cli.json {
                println!("{}", e.to_json());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
