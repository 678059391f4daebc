//! Event-driven simulation of the (N+1)-player Nash dynamics and of the
//! i.i.d. limit process, coupled through shared randomness.
//!
//! All flip rates are bounded by 2 (|Z| <= 2 both for the N-player value
//! gap and the entropy field), so uniformization is exact: each player
//! carries a Poisson clock of rate [`DOMINATING_RATE`] and flips at a clock
//! tick iff an independent uniform mark falls below rate/Lambda, with the
//! rate evaluated at the tick time. The coupled simulator feeds the *same*
//! clocks and marks to the Nash process Y and the limit process X-tilde, so
//! the two trajectories of a player separate only when a mark lands between
//! their rates.
//!
//! Randomness is organized as one ChaCha stream per (replication, player,
//! purpose): stream id `rep << 21 | player << 1 | tag`, with tag 0 drawing
//! the initial state and tag 1 the clock gaps and marks, all on top of the
//! experiment seed. Replications therefore neither share state nor depend
//! on scheduling order, and runs are bit-reproducible under any thread
//! count (players are capped at 2^20 per replication by the layout).

use crate::nash::{LimitRates, ValueTable};
use crate::simplex::PlayerState;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dominating uniformization rate Lambda; valid because |Z| <= 2.
pub const DOMINATING_RATE: f64 = 2.0;

const PLAYER_BITS: u64 = 20;

/// Initial configuration of the N+1 players.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// i.i.d. over {-1, +1} with P(+1) = mu0.
    Bernoulli(f64),
    /// Fixed configuration, one entry per player.
    Explicit(Vec<PlayerState>),
}

/// Configuration of one batch of replications.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// N: the table parameter; the simulation runs N+1 players.
    pub n_others: usize,
    pub horizon: f64,
    pub initial: InitialCondition,
    pub seed: u64,
    pub replications: usize,
}

impl SimConfig {
    pub fn n_players(&self) -> usize {
        self.n_others + 1
    }

    fn validate(&self) -> Result<()> {
        if self.replications == 0
            || self.n_others == 0
            || !self.horizon.is_finite()
            || self.horizon <= 0.0
        {
            return Err(Error::OutOfRange {
                what: "sim config",
                value: self.replications.min(self.n_others) as f64,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        if self.n_players() as u64 > 1 << PLAYER_BITS {
            return Err(Error::OutOfRange {
                what: "player count",
                value: self.n_players() as f64,
                min: 1.0,
                max: (1u64 << PLAYER_BITS) as f64,
            });
        }
        match &self.initial {
            InitialCondition::Bernoulli(mu0) => {
                if !(0.0..=1.0).contains(mu0) {
                    return Err(Error::OutOfRange {
                        what: "mu0",
                        value: *mu0,
                        min: 0.0,
                        max: 1.0,
                    });
                }
            }
            InitialCondition::Explicit(cfg) => {
                if cfg.len() != self.n_players() {
                    return Err(Error::OutOfRange {
                        what: "explicit configuration length",
                        value: cfg.len() as f64,
                        min: self.n_players() as f64,
                        max: self.n_players() as f64,
                    });
                }
            }
        }
        Ok(())
    }
}

fn stream(seed: u64, rep: u64, player: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((rep << (PLAYER_BITS + 1)) | (player << 1) | tag);
    rng
}

/// Draws the i.i.d. initial configuration of replication `rep`.
pub fn draw_initial(seed: u64, rep: usize, n_players: usize, mu0: f64) -> Vec<PlayerState> {
    (0..n_players)
        .map(|p| {
            let mut rng = stream(seed, rep as u64, p as u64, 0);
            if rng.gen::<f64>() < mu0 {
                PlayerState::Plus
            } else {
                PlayerState::Minus
            }
        })
        .collect()
}

/// One uniformization clock tick: candidate flip of `player` at `time`,
/// accepted iff `mark < rate / DOMINATING_RATE`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick {
    pub time: f64,
    pub player: usize,
    pub mark: f64,
}

/// All clock ticks of one replication, time-ordered (ties broken by player
/// index, which happens with probability zero).
pub fn replication_ticks(seed: u64, rep: usize, n_players: usize, horizon: f64) -> Vec<Tick> {
    let mut ticks = Vec::with_capacity((n_players as f64 * DOMINATING_RATE * horizon) as usize + 8);
    for p in 0..n_players {
        let mut rng = stream(seed, rep as u64, p as u64, 1);
        let mut t = 0.0;
        loop {
            let u: f64 = rng.gen();
            t += -(1.0 - u).ln() / DOMINATING_RATE;
            if t > horizon {
                break;
            }
            let mark: f64 = rng.gen();
            ticks.push(Tick {
                time: t,
                player: p,
                mark,
            });
        }
    }
    ticks.sort_by(|a, b| {
        a.time
            .partial_cmp(&b.time)
            .unwrap()
            .then(a.player.cmp(&b.player))
    });
    ticks
}

/// An accepted flip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub time: f64,
    pub player: usize,
    pub to: PlayerState,
}

/// Piecewise-constant path of one replication, stored as the initial
/// configuration plus the accepted flips in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub initial: Vec<PlayerState>,
    pub jumps: Vec<Jump>,
    pub terminal: Vec<PlayerState>,
}

impl Path {
    pub fn n_players(&self) -> usize {
        self.initial.len()
    }

    /// Number of players in state +1 at time `t` (right-continuous).
    pub fn plus_count_at(&self, t: f64) -> usize {
        let mut k = self
            .initial
            .iter()
            .filter(|s| **s == PlayerState::Plus)
            .count() as isize;
        for j in &self.jumps {
            if j.time > t {
                break;
            }
            k += if j.to == PlayerState::Plus { 1 } else { -1 };
        }
        k as usize
    }

    /// Empirical mean at `t`, computed as (2k - n)/n so that mirrored
    /// configurations produce exactly negated means.
    pub fn mean_at(&self, t: f64) -> f64 {
        let n = self.n_players();
        (2.0 * self.plus_count_at(t) as f64 - n as f64) / n as f64
    }

    pub fn terminal_mean(&self) -> f64 {
        let n = self.n_players();
        let k = self
            .terminal
            .iter()
            .filter(|s| **s == PlayerState::Plus)
            .count();
        (2.0 * k as f64 - n as f64) / n as f64
    }

    pub fn jump_count(&self, player: usize) -> usize {
        self.jumps.iter().filter(|j| j.player == player).count()
    }

    pub fn state_at(&self, player: usize, t: f64) -> PlayerState {
        let mut s = self.initial[player];
        for j in &self.jumps {
            if j.time > t {
                break;
            }
            if j.player == player {
                s = j.to;
            }
        }
        s
    }

    /// Number of moves against the absorbed majority: a downward flip after
    /// the +1 count has ever reached N/2 + 1, or an upward flip after it has
    /// ever dropped to N/2 - 1 (counts over all N+1 players, N = others).
    pub fn absorbing_band_violations(&self) -> usize {
        let n_others = self.n_players() - 1;
        let mut k = self.plus_count_at(-1.0) as i64;
        let upper = |k: i64| 2 * k >= n_others as i64 + 2;
        let lower = |k: i64| 2 * k <= n_others as i64 - 2;
        let mut in_upper = upper(k);
        let mut in_lower = lower(k);
        let mut violations = 0;
        for j in &self.jumps {
            let dk = if j.to == PlayerState::Plus { 1 } else { -1 };
            if dk < 0 && in_upper {
                violations += 1;
            }
            if dk > 0 && in_lower {
                violations += 1;
            }
            k += dk;
            in_upper = in_upper || upper(k);
            in_lower = in_lower || lower(k);
        }
        violations
    }
}

fn initial_for_rep(cfg: &SimConfig, rep: usize) -> Vec<PlayerState> {
    match &cfg.initial {
        InitialCondition::Bernoulli(mu0) => draw_initial(cfg.seed, rep, cfg.n_players(), *mu0),
        InitialCondition::Explicit(states) => states.clone(),
    }
}

fn check_rate(rate: f64, t: f64) -> Result<f64> {
    if rate > DOMINATING_RATE + 1e-9 {
        Err(Error::RateBound {
            rate,
            bound: DOMINATING_RATE,
            t,
        })
    } else {
        Ok(rate)
    }
}

/// Runs one Nash replication from an explicit initial configuration using
/// the tick stream of replication `rep`.
pub fn nash_replication(
    table: &ValueTable,
    cfg: &SimConfig,
    rep: usize,
    init: Vec<PlayerState>,
) -> Result<Path> {
    let n = cfg.n_others;
    let ticks = replication_ticks(cfg.seed, rep, cfg.n_players(), cfg.horizon);
    let mut states = init.clone();
    let mut k_plus = states.iter().filter(|s| **s == PlayerState::Plus).count();
    let mut jumps = Vec::new();
    for tick in ticks {
        let s = states[tick.player];
        let k_others = k_plus - usize::from(s == PlayerState::Plus);
        let mu = crate::simplex::SimplexFraction::new(k_others, n).expect("on-grid fraction");
        let rate = check_rate(table.nash_rate(tick.time, s, mu), tick.time)?;
        if tick.mark < rate / DOMINATING_RATE {
            let to = s.flipped();
            states[tick.player] = to;
            k_plus = if to == PlayerState::Plus {
                k_plus + 1
            } else {
                k_plus - 1
            };
            jumps.push(Jump {
                time: tick.time,
                player: tick.player,
                to,
            });
        }
    }
    Ok(Path {
        initial: init,
        jumps,
        terminal: states,
    })
}

/// Simulates the Nash dynamics; one [`Path`] per replication.
pub fn simulate_nash(cfg: &SimConfig, table: &ValueTable) -> Result<Vec<Path>> {
    cfg.validate()?;
    assert_eq!(table.n_others(), cfg.n_others, "table solved for this N");
    crate::par::try_map_indexed(cfg.replications, |rep| {
        nash_replication(table, cfg, rep, initial_for_rep(cfg, rep))
    })
}

/// Runs one limit-process replication: players flip independently at the
/// deterministic rates along the induced flow.
pub fn iid_replication(
    rates: &LimitRates,
    cfg: &SimConfig,
    rep: usize,
    init: Vec<PlayerState>,
) -> Result<Path> {
    let ticks = replication_ticks(cfg.seed, rep, cfg.n_players(), cfg.horizon);
    let mut states = init.clone();
    let mut jumps = Vec::new();
    for tick in ticks {
        let s = states[tick.player];
        let rate = check_rate(rates.rate(tick.time, s), tick.time)?;
        if tick.mark < rate / DOMINATING_RATE {
            let to = s.flipped();
            states[tick.player] = to;
            jumps.push(Jump {
                time: tick.time,
                player: tick.player,
                to,
            });
        }
    }
    Ok(Path {
        initial: init,
        jumps,
        terminal: states,
    })
}

/// Simulates the i.i.d. limit process. Refuses a centered initial law
/// (the flow itself is undefined there).
pub fn simulate_iid_limit(cfg: &SimConfig, rates: &LimitRates) -> Result<Vec<Path>> {
    cfg.validate()?;
    if let InitialCondition::Bernoulli(mu0) = cfg.initial {
        if mu0 == 0.5 {
            return Err(Error::CenteredStart);
        }
    }
    crate::par::try_map_indexed(cfg.replications, |rep| {
        iid_replication(rates, cfg, rep, initial_for_rep(cfg, rep))
    })
}

/// One coupled replication: both processes consumed the same ticks.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPath {
    pub nash: Path,
    pub limit: Path,
    /// Per player: did the two trajectories ever differ?
    pub decoupled: Vec<bool>,
}

impl CoupledPath {
    /// sup_t |Y_i(t) - X~_i(t)|, which on {-1, +1} is 0 or 2.
    pub fn sup_distance(&self, player: usize) -> f64 {
        if self.decoupled[player] {
            2.0
        } else {
            0.0
        }
    }
}

/// Runs one coupled replication: identical initial data, clocks, and marks;
/// each process accepts a tick iff the mark clears its own rate.
pub fn coupled_replication(
    table: &ValueTable,
    rates: &LimitRates,
    cfg: &SimConfig,
    rep: usize,
    init: Vec<PlayerState>,
) -> Result<CoupledPath> {
    let n = cfg.n_others;
    let ticks = replication_ticks(cfg.seed, rep, cfg.n_players(), cfg.horizon);
    let mut y = init.clone();
    let mut x = init.clone();
    let mut decoupled = vec![false; cfg.n_players()];
    let mut k_plus = y.iter().filter(|s| **s == PlayerState::Plus).count();
    let mut y_jumps = Vec::new();
    let mut x_jumps = Vec::new();
    for tick in ticks {
        let sy = y[tick.player];
        let k_others = k_plus - usize::from(sy == PlayerState::Plus);
        let mu = crate::simplex::SimplexFraction::new(k_others, n).expect("on-grid fraction");
        let rate_y = check_rate(table.nash_rate(tick.time, sy, mu), tick.time)?;
        if tick.mark < rate_y / DOMINATING_RATE {
            let to = sy.flipped();
            y[tick.player] = to;
            k_plus = if to == PlayerState::Plus {
                k_plus + 1
            } else {
                k_plus - 1
            };
            y_jumps.push(Jump {
                time: tick.time,
                player: tick.player,
                to,
            });
        }

        let sx = x[tick.player];
        let rate_x = check_rate(rates.rate(tick.time, sx), tick.time)?;
        if tick.mark < rate_x / DOMINATING_RATE {
            let to = sx.flipped();
            x[tick.player] = to;
            x_jumps.push(Jump {
                time: tick.time,
                player: tick.player,
                to,
            });
        }

        if y[tick.player] != x[tick.player] {
            decoupled[tick.player] = true;
        }
    }
    Ok(CoupledPath {
        nash: Path {
            initial: init.clone(),
            jumps: y_jumps,
            terminal: y,
        },
        limit: Path {
            initial: init,
            jumps: x_jumps,
            terminal: x,
        },
        decoupled,
    })
}

/// Simulates the synchronous coupling of the Nash process and the i.i.d.
/// limit process across replications.
pub fn simulate_coupled(
    cfg: &SimConfig,
    table: &ValueTable,
    rates: &LimitRates,
) -> Result<Vec<CoupledPath>> {
    cfg.validate()?;
    assert_eq!(table.n_others(), cfg.n_others, "table solved for this N");
    if let InitialCondition::Bernoulli(mu0) = cfg.initial {
        if mu0 == 0.5 {
            return Err(Error::CenteredStart);
        }
    }
    crate::par::try_map_indexed(cfg.replications, |rep| {
        coupled_replication(table, rates, cfg, rep, initial_for_rep(cfg, rep))
    })
}

/// Monte Carlo estimate of E[sup_t |Y_0(t) - X~_0(t)|] for one N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaosEstimate {
    pub n_others: usize,
    pub replications: usize,
    pub estimate: f64,
    /// Standard error (Jeffreys-smoothed so degenerate frozen dynamics
    /// still report a strictly positive uncertainty).
    pub std_error: f64,
}

/// Runs the coupled simulation and summarizes the representative player's
/// sup-distance.
pub fn chaos_metric(
    cfg: &SimConfig,
    table: &ValueTable,
    rates: &LimitRates,
) -> Result<ChaosEstimate> {
    let paths = simulate_coupled(cfg, table, rates)?;
    let r = paths.len();
    let decoupled = paths.iter().filter(|p| p.decoupled[0]).count();
    let estimate = 2.0 * decoupled as f64 / r as f64;
    let p_smooth = (decoupled as f64 + 0.5) / (r as f64 + 1.0);
    let std_error = 2.0 * (p_smooth * (1.0 - p_smooth) / r as f64).sqrt();
    Ok(ChaosEstimate {
        n_others: cfg.n_others,
        replications: r,
        estimate,
        std_error,
    })
}

/// Outcome of the centered-start selection experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroStartResult {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
    /// Terminal empirical mean of every replication.
    pub terminal_means: Vec<f64>,
    /// Checkpoint times and the across-replication average of |mean(t)|.
    pub checkpoints: Vec<f64>,
    pub mean_abs_at_checkpoints: Vec<f64>,
}

impl ZeroStartResult {
    pub fn replications(&self) -> usize {
        self.plus + self.minus + self.zero
    }

    pub fn mean_abs_terminal(&self) -> f64 {
        let r = self.terminal_means.len() as f64;
        self.terminal_means.iter().map(|m| m.abs()).sum::<f64>() / r
    }
}

/// Runs the Nash dynamics from the symmetric initial law mu0 = 1/2 and
/// tallies the sign of the terminal empirical mean, with a dead band of
/// 1/N mapped to "zero" (discrete parity can land exactly on zero). Also
/// records the averaged |mean| path for comparison with the escaping
/// branches.
pub fn zero_start_experiment(
    cfg: &SimConfig,
    table: &ValueTable,
    checkpoints: &[f64],
) -> Result<ZeroStartResult> {
    let centered = matches!(cfg.initial, InitialCondition::Bernoulli(mu0) if mu0 == 0.5);
    if !centered {
        return Err(Error::OutOfRange {
            what: "zero-start initial law",
            value: f64::NAN,
            min: 0.5,
            max: 0.5,
        });
    }
    let paths = simulate_nash(cfg, table)?;
    let dead_band = 1.0 / cfg.n_others as f64;
    let (mut plus, mut minus, mut zero) = (0usize, 0usize, 0usize);
    let mut terminal_means = Vec::with_capacity(paths.len());
    let mut abs_sums = vec![0.0f64; checkpoints.len()];
    for path in &paths {
        let m = path.terminal_mean();
        terminal_means.push(m);
        if m.abs() < dead_band {
            zero += 1;
        } else if m > 0.0 {
            plus += 1;
        } else {
            minus += 1;
        }
        for (sum, &t) in abs_sums.iter_mut().zip(checkpoints) {
            *sum += path.mean_at(t).abs();
        }
    }
    let r = paths.len() as f64;
    Ok(ZeroStartResult {
        plus,
        minus,
        zero,
        terminal_means,
        checkpoints: checkpoints.to_vec(),
        mean_abs_at_checkpoints: abs_sums.into_iter().map(|s| s / r).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::EntropyField;
    use crate::nash::{solve_value, SolveOptions};
    use crate::ode::{integrate_grid, OdeOptions};
    use crate::simplex::{MeanState, TimeGrid};

    fn table(n: usize, t: f64) -> ValueTable {
        solve_value(n, t, &SolveOptions::default()).unwrap()
    }

    fn limit_rates(horizon: f64, m0: f64) -> LimitRates {
        let field = EntropyField::new(horizon);
        let grid = TimeGrid::uniform(horizon, 1e-3).unwrap();
        let flow = field
            .induced_flow(MeanState::new(m0).unwrap(), &grid)
            .unwrap();
        LimitRates::new(&field, &flow)
    }

    #[test]
    fn aligned_configuration_never_jumps() {
        let tbl = table(8, 2.0);
        let cfg = SimConfig {
            n_others: 8,
            horizon: 2.0,
            initial: InitialCondition::Explicit(vec![PlayerState::Plus; 9]),
            seed: 3,
            replications: 50,
        };
        for path in simulate_nash(&cfg, &tbl).unwrap() {
            assert!(path.jumps.is_empty());
        }
    }

    #[test]
    fn absorbing_band_holds_on_every_path() {
        let tbl = table(16, 2.0);
        let cfg = SimConfig {
            n_others: 16,
            horizon: 2.0,
            initial: InitialCondition::Bernoulli(0.5),
            seed: 11,
            replications: 300,
        };
        for path in simulate_nash(&cfg, &tbl).unwrap() {
            assert_eq!(path.absorbing_band_violations(), 0);
        }
    }

    #[test]
    fn two_player_jump_count_matches_master_equation() {
        // Brute-force oracle: the 4-state master equation of the 2-player
        // game, augmented with the accumulated expected jump rate of
        // player 0. States indexed (x0, x1) in {+,-}^2 as 2*b0 + b1 with
        // b = 1 for Minus.
        let horizon = 0.5;
        let mu0 = 0.6;
        let tbl = table(1, horizon);
        let rate = |t: f64, s: PlayerState, other: PlayerState| {
            let k = usize::from(other == PlayerState::Plus);
            tbl.nash_rate(t, s, crate::simplex::SimplexFraction::new(k, 1).unwrap())
        };
        let sgn = |b: usize| {
            if b == 0 {
                PlayerState::Plus
            } else {
                PlayerState::Minus
            }
        };
        let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
            // y[0..4] occupation probabilities, y[4] expected jumps of
            // player 0.
            for v in dy.iter_mut() {
                *v = 0.0;
            }
            for s0 in 0..2 {
                for s1 in 0..2 {
                    let idx = 2 * s0 + s1;
                    let a0 = rate(t, sgn(s0), sgn(s1));
                    let a1 = rate(t, sgn(s1), sgn(s0));
                    dy[idx] -= (a0 + a1) * y[idx];
                    dy[2 * (1 - s0) + s1] += a0 * y[idx];
                    dy[2 * s0 + (1 - s1)] += a1 * y[idx];
                    dy[4] += a0 * y[idx];
                }
            }
        };
        let p0 = [
            mu0 * mu0,
            mu0 * (1.0 - mu0),
            (1.0 - mu0) * mu0,
            (1.0 - mu0) * (1.0 - mu0),
            0.0,
        ];
        let grid: Vec<f64> = (0..=50).map(|i| horizon * i as f64 / 50.0).collect();
        let sol = integrate_grid(rhs, &p0, &grid, &OdeOptions::default()).unwrap();
        let expected_jumps = sol.last().unwrap()[4];

        let reps = 40_000;
        let cfg = SimConfig {
            n_others: 1,
            horizon,
            initial: InitialCondition::Bernoulli(mu0),
            seed: 19,
            replications: reps,
        };
        let paths = simulate_nash(&cfg, &tbl).unwrap();
        let counts: Vec<f64> = paths.iter().map(|p| p.jump_count(0) as f64).collect();
        let mean = counts.iter().sum::<f64>() / reps as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        assert!(
            (mean - expected_jumps).abs() <= 3.0 * se + 1e-6,
            "MC {mean} vs oracle {expected_jumps} (se {se})"
        );
    }

    #[test]
    fn iid_marginal_tracks_induced_flow() {
        let horizon = 2.0;
        let m0 = 0.5;
        let field = EntropyField::new(horizon);
        let grid = TimeGrid::uniform(horizon, 1e-3).unwrap();
        let flow = field
            .induced_flow(MeanState::new(m0).unwrap(), &grid)
            .unwrap();
        let rates = LimitRates::new(&field, &flow);
        let cfg = SimConfig {
            n_others: 9,
            horizon,
            initial: InitialCondition::Bernoulli(0.75),
            seed: 101,
            replications: 4000,
        };
        let paths = simulate_iid_limit(&cfg, &rates).unwrap();
        let samples = (cfg.replications * cfg.n_players()) as f64;
        for &t in &[0.25, 0.5, 1.0, 1.5, 2.0] {
            let mut sum = 0.0;
            for path in &paths {
                sum += path.mean_at(t) * cfg.n_players() as f64;
            }
            let mean = sum / samples;
            let target = flow.mean_at(t);
            // Bernoulli-like variance of a {-1, 1} variable.
            let se = ((1.0 - target * target).max(0.01) / samples).sqrt();
            assert!(
                (mean - target).abs() <= 3.0 * se,
                "t = {t}: {mean} vs {target} (se {se})"
            );
        }
    }

    #[test]
    fn iid_players_are_independent() {
        let rates = limit_rates(2.0, 0.5);
        let cfg = SimConfig {
            n_others: 1,
            horizon: 2.0,
            initial: InitialCondition::Bernoulli(0.75),
            seed: 7,
            replications: 20_000,
        };
        let paths = simulate_iid_limit(&cfg, &rates).unwrap();
        let (mut s0, mut s1, mut s01) = (0.0, 0.0, 0.0);
        for p in &paths {
            let a = p.terminal[0].value();
            let b = p.terminal[1].value();
            s0 += a;
            s1 += b;
            s01 += a * b;
        }
        let r = cfg.replications as f64;
        let cov = s01 / r - (s0 / r) * (s1 / r);
        // Var of the product summand is at most 1.
        assert!(cov.abs() <= 3.0 / r.sqrt(), "cov = {cov}");
    }

    #[test]
    fn frozen_start_freezes_everything() {
        let tbl = table(8, 2.0);
        let rates = limit_rates(2.0, 1.0);
        let cfg = SimConfig {
            n_others: 8,
            horizon: 2.0,
            initial: InitialCondition::Bernoulli(1.0),
            seed: 23,
            replications: 200,
        };
        let est = chaos_metric(&cfg, &tbl, &rates).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert!(est.std_error > 0.0);
    }

    #[test]
    fn coupled_sup_distance_is_zero_or_two() {
        let tbl = table(8, 1.0);
        let rates = limit_rates(1.0, 0.5);
        let cfg = SimConfig {
            n_others: 8,
            horizon: 1.0,
            initial: InitialCondition::Bernoulli(0.75),
            seed: 31,
            replications: 200,
        };
        for path in simulate_coupled(&cfg, &tbl, &rates).unwrap() {
            for player in 0..cfg.n_players() {
                let d = path.sup_distance(player);
                assert!(d == 0.0 || d == 2.0);
            }
        }
    }

    #[test]
    fn centered_start_rejected_where_undefined() {
        let tbl = table(8, 1.0);
        let rates = limit_rates(1.0, 0.5);
        let cfg = SimConfig {
            n_others: 8,
            horizon: 1.0,
            initial: InitialCondition::Bernoulli(0.5),
            seed: 1,
            replications: 10,
        };
        assert!(matches!(
            simulate_iid_limit(&cfg, &rates),
            Err(Error::CenteredStart)
        ));
        assert!(matches!(
            simulate_coupled(&cfg, &tbl, &rates),
            Err(Error::CenteredStart)
        ));
    }

    #[test]
    fn identical_seeds_reproduce_event_sequences() {
        let tbl = table(8, 1.0);
        let cfg = SimConfig {
            n_others: 8,
            horizon: 1.0,
            initial: InitialCondition::Bernoulli(0.6),
            seed: 77,
            replications: 20,
        };
        let a = simulate_nash(&cfg, &tbl).unwrap();
        let b = simulate_nash(&cfg, &tbl).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exchangeability_of_players() {
        // Two-sample chi-square on the joint law of (bucketed jump count,
        // terminal sign) for player 0 vs player 8; 6 cells, dof 5,
        // 1% critical value 15.0863.
        let tbl = table(15, 1.0);
        let cfg = SimConfig {
            n_others: 15,
            horizon: 1.0,
            initial: InitialCondition::Bernoulli(0.6),
            seed: 13,
            replications: 4000,
        };
        let paths = simulate_nash(&cfg, &tbl).unwrap();
        let bucket = |p: &Path, player: usize| {
            let jumps = p.jump_count(player).min(2);
            let plus = usize::from(p.terminal[player] == PlayerState::Plus);
            3 * plus + jumps
        };
        let mut obs = [[0.0f64; 6]; 2];
        for p in &paths {
            obs[0][bucket(p, 0)] += 1.0;
            obs[1][bucket(p, 8)] += 1.0;
        }
        let total: f64 = 2.0 * cfg.replications as f64;
        let mut stat = 0.0;
        for c in 0..6 {
            let col = obs[0][c] + obs[1][c];
            if col == 0.0 {
                continue;
            }
            for row in &obs {
                let expect = col * (cfg.replications as f64) / total;
                stat += (row[c] - expect).powi(2) / expect;
            }
        }
        assert!(stat <= 15.0863, "chi-square statistic {stat}");
    }

    #[test]
    fn zero_start_sign_flip_symmetry() {
        // Negating every initial configuration while replaying the same
        // clocks and marks mirrors each path exactly.
        let tbl = table(16, 2.0);
        let base = SimConfig {
            n_others: 16,
            horizon: 2.0,
            initial: InitialCondition::Bernoulli(0.5),
            seed: 5,
            replications: 100,
        };
        for rep in 0..base.replications {
            let init = draw_initial(base.seed, rep, base.n_players(), 0.5);
            let flipped: Vec<PlayerState> = init.iter().map(|s| s.flipped()).collect();
            let a = nash_replication(&tbl, &base, rep, init).unwrap();
            let b = nash_replication(&tbl, &base, rep, flipped).unwrap();
            assert_eq!(a.terminal_mean(), -b.terminal_mean());
            assert_eq!(a.jumps.len(), b.jumps.len());
            for (ja, jb) in a.jumps.iter().zip(&b.jumps) {
                assert_eq!(ja.time, jb.time);
                assert_eq!(ja.player, jb.player);
                assert_eq!(ja.to, jb.to.flipped());
            }
        }
    }

    #[test]
    fn initial_band_escape_probability() {
        // The share of initial draws landing inside the band
        // (N/2 - N eps, N/2 + N eps + 1) obeys a Chebyshev bound of order
        // 1/(N eps): empirical counts match the exact binomial mass, and
        // the exact mass times N eps stays bounded.
        let mu0 = 0.75f64;
        let eps = 0.125; // mu0 = 1/2 + 2 eps
        for &n in &[16usize, 32, 64, 128] {
            let n_players = n + 1;
            let lo = 0.5 * n as f64 - n as f64 * eps;
            let hi = 0.5 * n as f64 + n as f64 * eps + 1.0;
            let in_band = |count: usize| {
                let c = count as f64;
                c > lo && c < hi
            };
            // Exact binomial mass of the band.
            let mut mass = 0.0;
            let mut pmf = (1.0 - mu0).powi(n_players as i32);
            for k in 0..=n_players {
                if in_band(k) {
                    mass += pmf;
                }
                if k < n_players {
                    pmf *= (n_players - k) as f64 / (k + 1) as f64 * mu0 / (1.0 - mu0);
                }
            }
            let reps = 4000;
            let mut hits = 0usize;
            for rep in 0..reps {
                let init = draw_initial(2024, rep, n_players, mu0);
                let count = init.iter().filter(|s| **s == PlayerState::Plus).count();
                if in_band(count) {
                    hits += 1;
                }
            }
            let frac = hits as f64 / reps as f64;
            let se = (mass * (1.0 - mass) / reps as f64).sqrt().max(1e-4);
            assert!(
                (frac - mass).abs() <= 4.0 * se,
                "N = {n}: {frac} vs {mass}"
            );
            assert!(
                mass * n as f64 * eps <= 2.0,
                "N = {n}: banded mass {mass} not O(1/(N eps))"
            );
        }
    }

    #[test]
    fn zero_start_requires_centered_law() {
        let tbl = table(8, 1.0);
        let cfg = SimConfig {
            n_others: 8,
            horizon: 1.0,
            initial: InitialCondition::Bernoulli(0.6),
            seed: 0,
            replications: 10,
        };
        assert!(zero_start_experiment(&cfg, &tbl, &[1.0]).is_err());
    }
}
