use clap::{Parser, Subcommand};
use mfg_lab::*;
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical experiments for the two-state mean field game: enumerate the
/// solution branches, tabulate the entropy solution of the master equation,
/// measure N-player convergence, couple the Nash dynamics to the limit
/// process, and score the branches of the potential control problem.
///
/// Every command writes CSV tables plus a JSON run manifest into the output
/// directory (flag --out, else $MFG_LAB_OUT, else ./out) and is
/// deterministic given its full flag set.
#[derive(Parser)]
#[command(name = "mfg-lab", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_out(dir: &Option<PathBuf>) -> PathBuf {
    dir.clone()
        .or_else(|| std::env::var_os("MFG_LAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

#[derive(Subcommand)]
enum Command {
    /// Threshold time, consistency roots with residuals, and sampled branch
    /// trajectories.
    Roots {
        /// Horizon T.
        #[arg(long = "T", default_value_t = 2.0)]
        horizon: f64,
        /// Initial mean in [-1, 1].
        #[arg(long)]
        m0: f64,
        /// Trajectory sample count per branch.
        #[arg(long, default_value_t = 21)]
        samples: usize,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Verify residuals and the root-count classification; exit 4 on
        /// failure.
        #[arg(long)]
        check: bool,
    },
    /// Entropy solution tables and shock diagnostics.
    Entropy {
        #[arg(long = "T", default_value_t = 2.0)]
        horizon: f64,
        /// Nodes of the remaining-time grid on [0, T].
        #[arg(long, default_value_t = 9)]
        tau_points: usize,
        /// Nodes of the mean grid on [-1, 1].
        #[arg(long, default_value_t = 41)]
        m_points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        check: bool,
    },
    /// Convergence of the N-player value functions to the entropy value,
    /// outside an eps-band around the shock.
    Converge {
        /// Comma-separated list of N values.
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long = "T", default_value_t = 2.0)]
        horizon: f64,
        /// Half-width of the excluded band around mu = 1/2.
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        check: bool,
    },
    /// Propagation-of-chaos metric: coupled Nash and limit processes.
    Chaos {
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Initial probability of state +1 (must differ from 1/2).
        #[arg(long, default_value_t = 0.75)]
        mu0: f64,
        #[arg(long = "T", default_value_t = 2.0)]
        horizon: f64,
        /// Replications per N.
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the per-replication sup-distances.
        #[arg(long)]
        per_rep: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        check: bool,
    },
    /// Selection experiment from the symmetric initial law mu0 = 1/2.
    ZeroStart {
        #[arg(long = "N", default_value_t = 64)]
        n: usize,
        #[arg(long = "T", default_value_t = 2.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Checkpoints of the averaged |mean| path.
        #[arg(long, default_value_t = 11)]
        checkpoints: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        check: bool,
    },
    /// Branch costs of the potential control problem and the quadrature
    /// cross-check.
    Potential {
        #[arg(long = "T", default_value_t = 2.0)]
        horizon: f64,
        /// Comma-separated list of initial means.
        #[arg(long, value_delimiter = ',', required = true)]
        m0: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        check: bool,
    },
}

fn run(cli: Cli) -> CmdResult<Vec<PathBuf>> {
    match cli.command {
        Command::Roots {
            horizon,
            m0,
            samples,
            out,
            check,
        } => cmd_roots(&RootsArgs {
            horizon,
            m0,
            samples,
            out_dir: parse_out(&out),
            check,
        }),
        Command::Entropy {
            horizon,
            tau_points,
            m_points,
            out,
            check,
        } => cmd_entropy(&EntropyArgs {
            horizon,
            tau_points,
            m_points,
            out_dir: parse_out(&out),
            check,
        }),
        Command::Converge {
            n,
            horizon,
            eps,
            out,
            check,
        } => cmd_converge(&ConvergeArgs {
            n_list: n,
            horizon,
            eps,
            out_dir: parse_out(&out),
            check,
        }),
        Command::Chaos {
            n,
            mu0,
            horizon,
            reps,
            seed,
            per_rep,
            out,
            check,
        } => cmd_chaos(&ChaosArgs {
            n_list: n,
            mu0,
            horizon,
            reps,
            seed,
            per_rep,
            out_dir: parse_out(&out),
            check,
        }),
        Command::ZeroStart {
            n,
            horizon,
            reps,
            seed,
            checkpoints,
            out,
            check,
        } => cmd_zero_start(&ZeroStartArgs {
            n_others: n,
            horizon,
            reps,
            seed,
            checkpoints,
            out_dir: parse_out(&out),
            check,
        }),
        Command::Potential {
            horizon,
            m0,
            out,
            check,
        } => cmd_potential(&PotentialArgs {
            horizon,
            m0_list: m0,
            out_dir: parse_out(&out),
            check,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(exit_code::OK)
        }
        Err(e) => {
            eprintln!("mfg-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
