//! The symmetric (N+1)-player value function.
//!
//! Exchangeability and sign-flip invariance close the Hamilton-Jacobi
//! system on the value `V(t, mu)` of a +1 player facing a fraction `mu` of
//! the other N players in state +1 (the x = -1 value is `V(t, 1 - mu)`):
//!
//! ```text
//!   -dV/dt(t,mu) + H(V(t,1-mu) - V(t,mu))
//!       = N mu  [V(t,1-mu) - V(t,mu)]^- (V(t,mu-1/N) - V(t,mu))
//!       + N(1-mu) [V(t,mu+1/N) - V(t,1-mu-1/N)]^- (V(t,mu+1/N) - V(t,mu)),
//!   V(T,mu) = -(2 mu - 1),
//! ```
//!
//! with `H(p) = (p^-)^2 / 2`. The out-of-range couplings at mu = 0 and
//! mu = 1 carry vanishing prefactors, so the system is a well-posed
//! (N+1)-dimensional backward ODE; solutions stay in [-1, 1]. The value
//! difference `Z(t,mu) = V(t,1-mu) - V(t,mu)` determines the unique Nash
//! feedback: a +1 player flips at rate `[Z]^-`, a -1 player at `[Z]^+`, so
//! players aligned with the majority never move.

use crate::entropy::{interp, EntropyField};
use crate::ode::{integrate_grid, OdeOptions};
use crate::simplex::{
    hamiltonian, negative_part, positive_part, PlayerState, SimplexFraction, TimeGrid,
};
use crate::Result;

/// Integration controls for [`solve_value`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Cap on the dense-output grid gap; evaluation between nodes is linear.
    pub grid_step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            grid_step: 1e-3,
        }
    }
}

/// Solved value function on a dense time grid times the simplex S_N.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    n_others: usize,
    horizon: f64,
    times: Vec<f64>,
    /// Time-major rows, `values[i][k] = V(times[i], k/N)`.
    values: Vec<Vec<f64>>,
}

/// Backward time derivative of the value vector; `out[k] = dV/dt at mu = k/N`.
fn value_ode_rhs(n: usize, v: &[f64], out: &mut [f64]) {
    for k in 0..=n {
        let z_k = v[n - k] - v[k];
        let mut rhs = hamiltonian(z_k);
        if k > 0 {
            rhs -= k as f64 * negative_part(z_k) * (v[k - 1] - v[k]);
        }
        if k < n {
            let gap_up = v[k + 1] - v[n - k - 1];
            rhs -= (n - k) as f64 * negative_part(gap_up) * (v[k + 1] - v[k]);
        }
        out[k] = rhs;
    }
}

/// Integrates the closed system backward from `V(T, mu) = -(2 mu - 1)` and
/// stores the solution on a dense grid with gap `min(grid_step, T/1000)`.
pub fn solve_value(n_others: usize, horizon: f64, opts: &SolveOptions) -> Result<ValueTable> {
    assert!(n_others >= 1 && horizon > 0.0);
    let n = n_others;
    let step = opts.grid_step.min(horizon / 1000.0);
    let grid = TimeGrid::uniform(horizon, step)?;
    let nodes = grid.nodes();

    // Integrate in reversed time s = T - t, so dP/ds = -dV/dt.
    let terminal: Vec<f64> = (0..=n).map(|k| -(2.0 * k as f64 / n as f64 - 1.0)).collect();
    let mut scratch = vec![0.0; n + 1];
    let rhs = move |_s: f64, p: &[f64], dp: &mut [f64]| {
        value_ode_rhs(n, p, &mut scratch);
        for (d, r) in dp.iter_mut().zip(&scratch) {
            *d = -*r;
        }
    };
    let ode_opts = OdeOptions {
        abs_tol: opts.abs_tol,
        rel_tol: opts.rel_tol,
        max_step: None,
    };
    let rows_reversed = integrate_grid(rhs, &terminal, nodes, &ode_opts)?;

    // Row i of the table holds V at t = nodes[i] = T - s_{last-i}.
    let values: Vec<Vec<f64>> = rows_reversed.into_iter().rev().collect();
    Ok(ValueTable {
        n_others: n,
        horizon,
        times: nodes.to_vec(),
        values,
    })
}

impl ValueTable {
    pub fn n_others(&self) -> usize {
        self.n_others
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Node values at grid row `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    /// V(t, k/N), linear in t between grid rows.
    pub fn value(&self, t: f64, k: usize) -> f64 {
        debug_assert!(k <= self.n_others);
        let (i, w) = self.locate(t);
        self.values[i][k] * (1.0 - w) + self.values[i + 1][k] * w
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let times = &self.times;
        if t <= times[0] {
            return (0, 0.0);
        }
        let last = times.len() - 1;
        if t >= times[last] {
            return (last - 1, 1.0);
        }
        let i = match times.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return (i.min(last - 1), if i == last { 1.0 } else { 0.0 }),
            Err(i) => i - 1,
        };
        (i, (t - times[i]) / (times[i + 1] - times[i]))
    }

    /// Z(t, mu) = V(t, 1-mu) - V(t, mu).
    pub fn z(&self, t: f64, mu: SimplexFraction) -> f64 {
        debug_assert_eq!(mu.denominator(), self.n_others);
        let k = mu.count();
        self.value(t, self.n_others - k) - self.value(t, k)
    }

    /// W(t, mu) = V(t, mu) - V(t, mu + 1/N); errors at mu = 1.
    pub fn w(&self, t: f64, mu: SimplexFraction) -> Result<f64> {
        let up = mu.up()?;
        Ok(self.value(t, mu.count()) - self.value(t, up.count()))
    }

    /// Nash feedback rate of a player in state `x` facing other-fraction
    /// `mu`: `[Z]^-` for x = +1 and `[Z]^+` for x = -1.
    pub fn nash_rate(&self, t: f64, x: PlayerState, mu: SimplexFraction) -> f64 {
        let z = self.z(t, mu);
        match x {
            PlayerState::Plus => negative_part(z),
            PlayerState::Minus => positive_part(z),
        }
    }

    /// Largest violation over all grid nodes of the sign property
    /// `Z(t, mu) >= 0 for mu >= 1/2` and `Z(t, mu) <= 0 for mu <= 1/2`.
    /// The theorem makes both exact; the return is pure integrator error.
    pub fn verify_sign_property(&self) -> f64 {
        let n = self.n_others;
        let mut worst = 0.0f64;
        for row in &self.values {
            for k in 0..=n {
                let z = row[n - k] - row[k];
                if 2 * k >= n {
                    worst = worst.max(-z);
                }
                if 2 * k <= n {
                    worst = worst.max(z);
                }
            }
        }
        worst.max(0.0)
    }

    /// Largest |V| overshoot beyond the a priori bound |V| <= 1.
    pub fn bound_violation(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|row| row.iter())
            .map(|v| v.abs() - 1.0)
            .fold(0.0, f64::max)
    }
}

/// Max over the table grid, skipping fractions inside the epsilon-band
/// around 1/2, of |V^N - U*| against the entropy value function. This is
/// the quantity the convergence theorem bounds by C_eps / N.
pub fn convergence_error(table: &ValueTable, eps: f64) -> f64 {
    assert!(eps > 0.0);
    let n = table.n_others();
    let field = EntropyField::new(table.horizon());
    let mut worst = 0.0f64;
    for k in 0..=n {
        let mu = k as f64 / n as f64;
        if (mu - 0.5).abs() < eps {
            continue;
        }
        for (i, &t) in table.times().iter().enumerate() {
            let u = field.u_star(t, mu).expect("mu in [0,1]");
            let err = (table.row(i)[k] - u).abs();
            if err > worst {
                worst = err;
            }
        }
    }
    worst
}

/// Discrete Lipschitz diagnostic: max over the grid, with both mu and
/// mu + 1/N outside the epsilon-band, of |V(t, mu + 1/N) - V(t, mu)|.
/// Scaled by N this stays bounded away from the shock.
pub fn neighbor_gap(table: &ValueTable, eps: f64) -> f64 {
    let n = table.n_others();
    let mut worst = 0.0f64;
    for k in 0..n {
        let mu = k as f64 / n as f64;
        let mu_up = (k + 1) as f64 / n as f64;
        if (mu - 0.5).abs() < eps || (mu_up - 0.5).abs() < eps {
            continue;
        }
        for row in (0..table.times().len()).map(|i| table.row(i)) {
            worst = worst.max((row[k + 1] - row[k]).abs());
        }
    }
    worst
}

/// Tabulated `Z*(t) = Z(T - t, m*(t))` along an induced flow, the
/// deterministic rate driver of the i.i.d. limit process.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitRates {
    times: Vec<f64>,
    z_star: Vec<f64>,
}

impl LimitRates {
    pub fn new(field: &EntropyField, flow: &crate::entropy::InducedFlow) -> Self {
        let times = flow.times().to_vec();
        let z_star = times
            .iter()
            .zip(flow.means())
            .map(|(&t, &m)| {
                field.z(
                    (field.horizon() - t).max(0.0),
                    crate::simplex::MeanState::new(m.clamp(-1.0, 1.0)).unwrap(),
                )
            })
            .collect();
        LimitRates { times, z_star }
    }

    pub fn z_at(&self, t: f64) -> f64 {
        interp(&self.times, &self.z_star, t)
    }

    /// Flip rate of a player in state `x` at time `t`.
    pub fn rate(&self, t: f64, x: PlayerState) -> f64 {
        let z = self.z_at(t);
        match x {
            PlayerState::Plus => negative_part(z),
            PlayerState::Minus => positive_part(z),
        }
    }
}

/// Solves several (N, T) pairs, in parallel when the `parallel` feature is
/// enabled.
pub fn solve_value_batch(configs: &[(usize, f64)], opts: &SolveOptions) -> Result<Vec<ValueTable>> {
    crate::par::try_map_indexed(configs.len(), |i| {
        let (n, t) = configs[i];
        solve_value(n, t, opts)
    })
}
