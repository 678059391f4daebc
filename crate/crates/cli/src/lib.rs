//! Implementation of the `mfg-lab` subcommands: each one computes a
//! desk-scale experiment, writes versioned CSV tables plus a JSON run
//! manifest, and optionally verifies the documented properties of its own
//! output (`--check`).
//!
//! Output contract: every CSV has exactly one header row (the header string
//! is the schema version; see [`schema`]), floats are printed with 17
//! significant digits, and each run writes `<command>_manifest.json` beside
//! its CSVs with one entry per output file. All randomness derives from the
//! `--seed` flag, so a command's tables are byte-reproducible from its full
//! flag set.

use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

use two_state_mfg::entropy::{check_entropy_jump, EntropyField};
use two_state_mfg::mfg::{
    build_trajectory, enumerate_terminal_means, threshold_time, BranchLabel,
};
use two_state_mfg::nash::{
    convergence_error, solve_value, LimitRates, SolveOptions,
};
use two_state_mfg::potential::{branch_costs, cost_quadrature, phi};
use two_state_mfg::sim::{
    chaos_metric, zero_start_experiment, ChaosEstimate, InitialCondition, SimConfig,
};
use two_state_mfg::simplex::{MeanState, PlayerState, TimeGrid};

/// CSV schemas. The header row *is* the version: consumers (and the test
/// suite) match it verbatim.
pub mod schema {
    pub const ROOTS: &str = "m0,T,threshold_T,label,root,residual";
    pub const ROOTS_TRAJ: &str = "label,t,z,m";
    pub const ENTROPY_FIELD: &str = "tau,m,z,u_plus,u_minus";
    pub const ENTROPY_JUMP: &str = "tau,z_plus,z_minus,jump_ok,rh_residual";
    pub const CONVERGE: &str = "N,T,eps,error,ratio";
    pub const CHAOS: &str = "N,reps,estimate,std_error";
    pub const CHAOS_REPS: &str = "N,rep,sup_distance";
    pub const ZERO_START_HIST: &str = "sign,count,frequency";
    pub const ZERO_START_PATH: &str = "t,mean_abs_empirical,branch_abs_mean";
    pub const ZERO_START_REPS: &str = "rep,terminal_mean,sign";
    pub const POTENTIAL: &str =
        "m0,T,label,root,phi,quadrature,quad_residual,argmin,tie,ordering_ok";
}

/// Exit codes shared by the binary and the tests.
pub mod exit_code {
    pub const OK: u8 = 0;
    pub const INVALID_ARGS: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const CHECK_FAILED: u8 = 4;
}

#[derive(Debug)]
pub enum CmdError {
    /// Parameter validation failure (exit 2).
    InvalidArgs(String),
    /// Numerical failure from the solver layer (exit 3).
    Numerical(String),
    /// A `--check` property did not hold (exit 4).
    CheckFailed(String),
    /// Filesystem trouble (exit 3).
    Io(String),
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::InvalidArgs(m) => write!(f, "invalid arguments: {m}"),
            CmdError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CmdError::CheckFailed(m) => write!(f, "property check failed: {m}"),
            CmdError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl CmdError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CmdError::InvalidArgs(_) => exit_code::INVALID_ARGS,
            CmdError::Numerical(_) | CmdError::Io(_) => exit_code::NUMERICAL,
            CmdError::CheckFailed(_) => exit_code::CHECK_FAILED,
        }
    }
}

impl From<two_state_mfg::Error> for CmdError {
    fn from(e: two_state_mfg::Error) -> Self {
        CmdError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Io(e.to_string())
    }
}

pub type CmdResult<T> = Result<T, CmdError>;

/// 17-significant-digit float formatting for bit-faithful round-tripping.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV file accumulated in memory and flushed with its schema header.
struct Table {
    name: &'static str,
    header: &'static str,
    rows: Vec<String>,
}

impl Table {
    fn new(name: &'static str, header: &'static str) -> Self {
        Table {
            name,
            header,
            rows: Vec::new(),
        }
    }

    fn push_row(&mut self, row: String) {
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    file: String,
    schema: String,
    rows: usize,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    version: String,
    parameters: serde_json::Value,
    seed: Option<u64>,
    outputs: Vec<ManifestEntry>,
    duration_seconds: f64,
}

/// Writes every table plus the run manifest into `out_dir`.
fn flush(
    out_dir: &Path,
    command: &str,
    parameters: serde_json::Value,
    seed: Option<u64>,
    tables: Vec<Table>,
    started: Instant,
) -> CmdResult<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for table in &tables {
        let path = out_dir.join(table.name);
        let mut text = String::with_capacity(64 * (table.rows.len() + 1));
        text.push_str(table.header);
        text.push('\n');
        for row in &table.rows {
            text.push_str(row);
            text.push('\n');
        }
        std::fs::write(&path, text)?;
        entries.push(ManifestEntry {
            file: table.name.to_string(),
            schema: table.header.to_string(),
            rows: table.rows.len(),
        });
        written.push(path);
    }
    let manifest = RunManifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        parameters,
        seed,
        outputs: entries,
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    let path = out_dir.join(format!("{command}_manifest.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    written.push(path);
    Ok(written)
}

impl From<serde_json::Error> for CmdError {
    fn from(e: serde_json::Error) -> Self {
        CmdError::Io(e.to_string())
    }
}

fn mean(v: f64) -> CmdResult<MeanState> {
    MeanState::new(v).map_err(|e| CmdError::InvalidArgs(e.to_string()))
}

fn require(cond: bool, msg: &str) -> CmdResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CmdError::InvalidArgs(msg.to_string()))
    }
}

fn check(cond: bool, msg: String) -> CmdResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CmdError::CheckFailed(msg))
    }
}

// ---------------------------------------------------------------- roots --

pub struct RootsArgs {
    pub horizon: f64,
    pub m0: f64,
    pub samples: usize,
    pub out_dir: PathBuf,
    pub check: bool,
}

pub fn cmd_roots(args: &RootsArgs) -> CmdResult<Vec<PathBuf>> {
    let started = Instant::now();
    require(args.horizon > 0.0, "--T must be positive")?;
    require(args.samples >= 2, "--samples must be at least 2")?;
    let m0 = mean(args.m0)?;

    let threshold = threshold_time(m0);
    let roots = enumerate_terminal_means(args.horizon, m0);

    let mut table = Table::new("roots.csv", schema::ROOTS);
    for r in &roots.roots {
        table.push_row(format!(
            "{},{},{},{},{},{}",
            fmt_f64(args.m0),
            fmt_f64(args.horizon),
            fmt_f64(threshold),
            r.label,
            fmt_f64(r.value),
            fmt_f64(r.residual),
        ));
    }

    let mut traj_table = Table::new("roots_trajectories.csv", schema::ROOTS_TRAJ);
    for r in &roots.roots {
        // Only genuine branches get trajectories: the fold double root
        // inside the degeneracy band carries a residual at band scale and
        // has no closed-form flow.
        if r.residual.abs() > 1e-8 || (r.value == 0.0 && args.m0 != 0.0) {
            continue;
        }
        let traj = build_trajectory(args.horizon, m0, r.value)?;
        for i in 0..args.samples {
            let t = args.horizon * i as f64 / (args.samples - 1) as f64;
            traj_table.push_row(format!(
                "{},{},{},{}",
                r.label,
                fmt_f64(t),
                fmt_f64(traj.z(t)),
                fmt_f64(traj.mean(t)),
            ));
        }
    }

    if args.check {
        for r in &roots.roots {
            check(
                r.residual.abs() <= 1e-10,
                format!("root {} residual {} above 1e-10", r.label, r.residual),
            )?;
        }
        let expected = if args.m0 == 0.0 {
            if args.horizon > 0.5 {
                3
            } else {
                1
            }
        } else if (args.horizon - threshold).abs() <= 1e-6 {
            2
        } else if args.horizon > threshold {
            3
        } else {
            1
        };
        check(
            roots.count() == expected,
            format!("expected {expected} roots, found {}", roots.count()),
        )?;
    }

    let params = serde_json::json!({
        "T": args.horizon,
        "m0": args.m0,
        "samples": args.samples,
        "check": args.check,
    });
    flush(&args.out_dir, "roots", params, None, vec![table, traj_table], started)
}

// -------------------------------------------------------------- entropy --

pub struct EntropyArgs {
    pub horizon: f64,
    pub tau_points: usize,
    pub m_points: usize,
    pub out_dir: PathBuf,
    pub check: bool,
}

pub fn cmd_entropy(args: &EntropyArgs) -> CmdResult<Vec<PathBuf>> {
    let started = Instant::now();
    require(args.horizon > 0.0, "--T must be positive")?;
    require(
        args.tau_points >= 2 && args.m_points >= 3,
        "--tau-points >= 2 and --m-points >= 3",
    )?;
    let field = EntropyField::new(args.horizon);

    let mut field_table = Table::new("entropy_field.csv", schema::ENTROPY_FIELD);
    let mut max_odd_defect = 0.0f64;
    let mut max_initial_defect = 0.0f64;
    for i in 0..args.tau_points {
        let tau = args.horizon * i as f64 / (args.tau_points - 1) as f64;
        for j in 0..args.m_points {
            let mv = -1.0 + 2.0 * j as f64 / (args.m_points - 1) as f64;
            let m = mean(mv)?;
            let z = field.z(tau, m);
            let t = args.horizon - tau;
            let u_plus = field.u(t, PlayerState::Plus, m);
            let u_minus = field.u(t, PlayerState::Minus, m);
            field_table.push_row(format!(
                "{},{},{},{},{}",
                fmt_f64(tau),
                fmt_f64(mv),
                fmt_f64(z),
                fmt_f64(u_plus),
                fmt_f64(u_minus),
            ));
            max_odd_defect =
                max_odd_defect.max((z + field.z(tau, mean(-mv)?)).abs());
            if tau == 0.0 {
                max_initial_defect = max_initial_defect.max((z - 2.0 * mv).abs());
            }
        }
    }

    let mut jump_table = Table::new("entropy_jump.csv", schema::ENTROPY_JUMP);
    let mut all_jumps_ok = true;
    for i in 0..args.tau_points {
        let tau = args.horizon * i as f64 / (args.tau_points - 1) as f64;
        if tau <= 0.5 {
            continue;
        }
        let jc = check_entropy_jump(tau)?;
        all_jumps_ok &= jc.jump_ok;
        jump_table.push_row(format!(
            "{},{},{},{},{}",
            fmt_f64(tau),
            fmt_f64(jc.z_plus),
            fmt_f64(jc.z_minus),
            jc.jump_ok,
            fmt_f64(jc.rh_residual),
        ));
    }

    if args.check {
        check(
            max_initial_defect == 0.0,
            format!("initial condition defect {max_initial_defect}"),
        )?;
        check(
            max_odd_defect <= 1e-12,
            format!("odd symmetry defect {max_odd_defect}"),
        )?;
        check(all_jumps_ok, "entropy jump condition violated".to_string())?;
    }

    let params = serde_json::json!({
        "T": args.horizon,
        "tau_points": args.tau_points,
        "m_points": args.m_points,
        "check": args.check,
    });
    flush(
        &args.out_dir,
        "entropy",
        params,
        None,
        vec![field_table, jump_table],
        started,
    )
}

// ------------------------------------------------------------- converge --

pub struct ConvergeArgs {
    pub n_list: Vec<usize>,
    pub horizon: f64,
    pub eps: f64,
    pub out_dir: PathBuf,
    pub check: bool,
}

pub fn cmd_converge(args: &ConvergeArgs) -> CmdResult<Vec<PathBuf>> {
    let started = Instant::now();
    require(!args.n_list.is_empty(), "--N list must not be empty")?;
    require(args.n_list.iter().all(|&n| n >= 1), "--N entries must be >= 1")?;
    require(args.horizon > 0.0, "--T must be positive")?;
    require(args.eps > 0.0 && args.eps < 0.5, "--eps must be in (0, 0.5)")?;

    let configs: Vec<(usize, f64)> =
        args.n_list.iter().map(|&n| (n, args.horizon)).collect();
    let tables =
        two_state_mfg::nash::solve_value_batch(&configs, &SolveOptions::default())?;
    let errors: Vec<f64> = tables
        .iter()
        .map(|t| convergence_error(t, args.eps))
        .collect();

    let mut table = Table::new("converge.csv", schema::CONVERGE);
    let mut prev: Option<f64> = None;
    let mut rows = Vec::new();
    for (&n, &err) in args.n_list.iter().zip(&errors) {
        let ratio = prev.map(|p| err / p);
        let ratio_text = ratio.map(fmt_f64).unwrap_or_default();
        table.push_row(format!(
            "{},{},{},{},{}",
            n,
            fmt_f64(args.horizon),
            fmt_f64(args.eps),
            fmt_f64(err),
            ratio_text,
        ));
        rows.push((n, err, ratio));
        prev = Some(err);
    }

    if args.check {
        for w in rows.windows(2) {
            let (n_prev, e_prev, _) = w[0];
            let (n, e, _) = w[1];
            check(
                e < e_prev,
                format!("error not decreasing from N={n_prev} to N={n}"),
            )?;
            if n_prev >= 32 {
                check(
                    e / e_prev <= 0.67,
                    format!("ratio {} above 0.67 at N={n}", e / e_prev),
                )?;
            }
        }
    }

    let params = serde_json::json!({
        "N": args.n_list,
        "T": args.horizon,
        "eps": args.eps,
        "check": args.check,
    });
    flush(&args.out_dir, "converge", params, None, vec![table], started)
}

// ---------------------------------------------------------------- chaos --

pub struct ChaosArgs {
    pub n_list: Vec<usize>,
    pub mu0: f64,
    pub horizon: f64,
    pub reps: usize,
    pub seed: u64,
    pub per_rep: bool,
    pub out_dir: PathBuf,
    pub check: bool,
}

pub fn cmd_chaos(args: &ChaosArgs) -> CmdResult<Vec<PathBuf>> {
    let started = Instant::now();
    require(!args.n_list.is_empty(), "--N list must not be empty")?;
    require((0.0..=1.0).contains(&args.mu0), "--mu0 must be in [0, 1]")?;
    require(args.mu0 != 0.5, "--mu0 = 1/2 starts at the shock; the limit process is undefined")?;
    require(args.horizon > 0.0, "--T must be positive")?;
    require(args.reps >= 1, "--reps must be >= 1")?;

    let m0 = 2.0 * args.mu0 - 1.0;
    let field = EntropyField::new(args.horizon);
    let grid = TimeGrid::uniform(args.horizon, 1e-3)
        .map_err(|e| CmdError::Numerical(e.to_string()))?;
    let flow = field.induced_flow(mean(m0)?, &grid)?;
    let rates = LimitRates::new(&field, &flow);

    let mut table = Table::new("chaos.csv", schema::CHAOS);
    let mut rep_table = Table::new("chaos_reps.csv", schema::CHAOS_REPS);
    let mut estimates: Vec<ChaosEstimate> = Vec::new();
    for &n in &args.n_list {
        let value_table = solve_value(n, args.horizon, &SolveOptions::default())?;
        let cfg = SimConfig {
            n_others: n,
            horizon: args.horizon,
            initial: InitialCondition::Bernoulli(args.mu0),
            seed: args.seed,
            replications: args.reps,
        };
        if args.per_rep {
            let paths = two_state_mfg::sim::simulate_coupled(&cfg, &value_table, &rates)?;
            for (rep, path) in paths.iter().enumerate() {
                rep_table.push_row(format!("{n},{rep},{}", fmt_f64(path.sup_distance(0))));
            }
        }
        let est = chaos_metric(&cfg, &value_table, &rates)?;
        table.push_row(format!(
            "{},{},{},{}",
            n,
            est.replications,
            fmt_f64(est.estimate),
            fmt_f64(est.std_error),
        ));
        estimates.push(est);
    }

    if args.check {
        for est in &estimates {
            check(
                (0.0..=2.0).contains(&est.estimate),
                format!("estimate {} outside [0, 2]", est.estimate),
            )?;
        }
        if args.mu0 == 1.0 {
            for est in &estimates {
                check(
                    est.estimate == 0.0,
                    format!("frozen dynamics produced estimate {}", est.estimate),
                )?;
            }
        } else {
            // Nonincreasing beyond noise: no increase above two combined
            // standard errors between consecutive N.
            for w in estimates.windows(2) {
                let slack = 2.0 * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
                check(
                    w[1].estimate <= w[0].estimate + slack,
                    format!(
                        "estimate rose from {} (N={}) to {} (N={})",
                        w[0].estimate, w[0].n_others, w[1].estimate, w[1].n_others
                    ),
                )?;
            }
        }
    }

    let params = serde_json::json!({
        "N": args.n_list,
        "mu0": args.mu0,
        "T": args.horizon,
        "reps": args.reps,
        "seed": args.seed,
        "check": args.check,
    });
    let mut tables = vec![table];
    if args.per_rep {
        tables.push(rep_table);
    }
    flush(&args.out_dir, "chaos", params, Some(args.seed), tables, started)
}

// ----------------------------------------------------------- zero-start --

pub struct ZeroStartArgs {
    pub n_others: usize,
    pub horizon: f64,
    pub reps: usize,
    pub seed: u64,
    pub checkpoints: usize,
    pub out_dir: PathBuf,
    pub check: bool,
}

pub fn cmd_zero_start(args: &ZeroStartArgs) -> CmdResult<Vec<PathBuf>> {
    let started = Instant::now();
    require(args.n_others >= 2, "--N must be >= 2")?;
    require(args.horizon > 0.0, "--T must be positive")?;
    require(args.reps >= 1, "--reps must be >= 1")?;
    require(args.checkpoints >= 2, "--checkpoints must be >= 2")?;

    let value_table = solve_value(args.n_others, args.horizon, &SolveOptions::default())?;
    let cfg = SimConfig {
        n_others: args.n_others,
        horizon: args.horizon,
        initial: InitialCondition::Bernoulli(0.5),
        seed: args.seed,
        replications: args.reps,
    };
    let times: Vec<f64> = (0..args.checkpoints)
        .map(|i| args.horizon * i as f64 / (args.checkpoints - 1) as f64)
        .collect();
    let result = zero_start_experiment(&cfg, &value_table, &times)?;

    // Reference escaping branch from the centered start.
    let m0 = mean(0.0)?;
    let plus_branch = enumerate_terminal_means(args.horizon, m0)
        .sign_matched()
        .value;
    let branch_mean: Vec<f64> = if plus_branch > 0.0 {
        let traj = build_trajectory(args.horizon, m0, plus_branch)?;
        times.iter().map(|&t| traj.mean(t).abs()).collect()
    } else {
        times.iter().map(|_| 0.0).collect()
    };

    let r = result.replications() as f64;
    let mut hist = Table::new("zero_start_hist.csv", schema::ZERO_START_HIST);
    for (sign, count) in [("+", result.plus), ("-", result.minus), ("0", result.zero)] {
        hist.push_row(format!("{sign},{count},{}", fmt_f64(count as f64 / r)));
    }

    let mut path_table = Table::new("zero_start_path.csv", schema::ZERO_START_PATH);
    for ((t, emp), branch) in times
        .iter()
        .zip(&result.mean_abs_at_checkpoints)
        .zip(&branch_mean)
    {
        path_table.push_row(format!(
            "{},{},{}",
            fmt_f64(*t),
            fmt_f64(*emp),
            fmt_f64(*branch),
        ));
    }

    let mut reps_table = Table::new("zero_start_reps.csv", schema::ZERO_START_REPS);
    let dead_band = 1.0 / args.n_others as f64;
    for (rep, &m) in result.terminal_means.iter().enumerate() {
        let sign = if m.abs() < dead_band {
            "0"
        } else if m > 0.0 {
            "+"
        } else {
            "-"
        };
        reps_table.push_row(format!("{rep},{},{sign}", fmt_f64(m)));
    }

    if args.check {
        let f_plus = result.plus as f64 / r;
        let f_minus = result.minus as f64 / r;
        check(
            (0.45..=0.55).contains(&f_plus) && (0.45..=0.55).contains(&f_minus),
            format!("terminal sign frequencies {f_plus} / {f_minus} outside [0.45, 0.55]"),
        )?;
        if plus_branch > 0.0 {
            let mean_abs = result.mean_abs_terminal();
            check(
                (mean_abs - plus_branch).abs() <= 0.1,
                format!("mean |m(T)| = {mean_abs} not within 0.1 of branch {plus_branch}"),
            )?;
        }
    }

    let params = serde_json::json!({
        "N": args.n_others,
        "T": args.horizon,
        "reps": args.reps,
        "seed": args.seed,
        "checkpoints": args.checkpoints,
        "check": args.check,
    });
    flush(
        &args.out_dir,
        "zero_start",
        params,
        Some(args.seed),
        vec![hist, path_table, reps_table],
        started,
    )
}

// ------------------------------------------------------------ potential --

pub struct PotentialArgs {
    pub horizon: f64,
    pub m0_list: Vec<f64>,
    pub out_dir: PathBuf,
    pub check: bool,
}

pub fn cmd_potential(args: &PotentialArgs) -> CmdResult<Vec<PathBuf>> {
    let started = Instant::now();
    require(args.horizon > 0.0, "--T must be positive")?;
    require(!args.m0_list.is_empty(), "--m0 list must not be empty")?;

    let mut table = Table::new("potential.csv", schema::POTENTIAL);
    for &m0v in &args.m0_list {
        let m0 = mean(m0v)?;
        let costs = branch_costs(args.horizon, m0);
        let by = |label: BranchLabel| costs.entries.iter().find(|e| e.label == label);
        let ordering_ok = match (by(BranchLabel::M1), by(BranchLabel::M2), by(BranchLabel::M3)) {
            (Some(c1), Some(c2), Some(c3)) => {
                if m0v == 0.0 {
                    c3.cost < c2.cost && (c3.cost - c1.cost).abs() <= 1e-12
                } else {
                    c3.cost < c1.cost && c1.cost < c2.cost
                }
            }
            _ => true, // fewer than three branches: nothing to order
        };
        for entry in &costs.entries {
            if entry.terminal_mean == 0.0 && m0v != 0.0 {
                continue;
            }
            let traj = build_trajectory(args.horizon, m0, entry.terminal_mean)?;
            let quad = cost_quadrature(&traj);
            let closed = phi(entry.terminal_mean, args.horizon);
            table.push_row(format!(
                "{},{},{},{},{},{},{},{},{},{}",
                fmt_f64(m0v),
                fmt_f64(args.horizon),
                entry.label,
                fmt_f64(entry.terminal_mean),
                fmt_f64(closed),
                fmt_f64(quad),
                fmt_f64((quad - closed).abs()),
                entry.label == costs.argmin,
                costs.tie,
                ordering_ok,
            ));
            if args.check {
                check(
                    (quad - closed).abs() <= 1e-8,
                    format!(
                        "quadrature residual {} above 1e-8 for branch {} at m0 = {m0v}",
                        (quad - closed).abs(),
                        entry.label
                    ),
                )?;
            }
        }
        if args.check {
            check(
                ordering_ok,
                format!("cost ordering violated at m0 = {m0v}"),
            )?;
            if m0v == 0.0 {
                check(costs.tie, "centered start should tie".to_string())?;
            } else if costs.entries.len() == 3 {
                check(
                    costs.argmin == BranchLabel::M3 && !costs.tie,
                    format!("argmin should be the sign-matched branch at m0 = {m0v}"),
                )?;
            }
        }
    }

    let params = serde_json::json!({
        "T": args.horizon,
        "m0": args.m0_list,
        "check": args.check,
    });
    flush(&args.out_dir, "potential", params, None, vec![table], started)
}
