//! The master equation of the two-state game reduces, for the value
//! difference `Z(tau, m) = U(T-tau, -1, m) - U(T-tau, 1, m)` in remaining
//! time `tau`, to the scalar conservation law
//!
//! ```text
//!     dZ/dtau + d/dm ( m Z|Z|/2 - Z^2/2 ) = 0,      Z(0, m) = 2m.
//! ```
//!
//! Its entropy solution is explicit: `Z(tau, m) = 2 M(tau, m) / (tau
//! |M(tau, m)| + 1)` where `M(tau, m)` is the sign-matched root of the
//! consistency cubic with horizon `tau`, and `M(tau, 0) = 0`. The solution
//! develops a stationary shock at m = 0 once `tau > 1/2`, where the one-sided
//! limits satisfy the Rankine-Hugoniot and Lax conditions in the degenerate
//! form `Z+ = -Z- >= 0`. Away from the shock the field is smooth and the
//! classical PDE residual vanishes.
//!
//! This module also provides the value function `U` reconstructed along the
//! characteristics, its fraction-variable form `U*`, and the forward flow
//! induced by the field, whose unique sign-preserving solution lands on the
//! sign-matched branch of the mean field game.

use crate::mfg::{positive_branch_root, positive_root_at_zero};
use crate::ode::{integrate_grid, OdeOptions};
use crate::simplex::{MeanState, PlayerState, TimeGrid};
use crate::{Error, Result};

/// The unique root of the consistency cubic with horizon `tau` sharing the
/// sign of `m` (zero for m = 0). Continuous in m away from 0, with one-sided
/// limits +-M_plus(tau) at the shock.
pub fn sign_root(tau: f64, m: MeanState) -> f64 {
    debug_assert!(tau >= 0.0);
    let mv = m.value();
    if mv == 0.0 {
        0.0
    } else if mv > 0.0 {
        positive_branch_root(tau, mv)
    } else {
        -positive_branch_root(tau, -mv)
    }
}

/// Entropy solution Z(tau, m) = 2 M(tau, m) / (tau |M(tau, m)| + 1).
pub fn entropy_z(tau: f64, m: MeanState) -> f64 {
    let root = sign_root(tau, m);
    2.0 * root / (tau * root.abs() + 1.0)
}

/// Flux g(m, z) = m z|z|/2 - z^2/2 of the conservation law.
#[inline]
pub fn flux(m: f64, z: f64) -> f64 {
    0.5 * m * z * z.abs() - 0.5 * z * z
}

/// One-sided shock data at m = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpCheck {
    pub tau: f64,
    pub z_plus: f64,
    pub z_minus: f64,
    /// Z+ = -Z- >= 0 within 1e-10.
    pub jump_ok: bool,
    /// |g(0, Z-) - g(0, Z+)|; vanishes for the stationary shock.
    pub rh_residual: f64,
}

/// Verifies the entropy jump conditions at the stationary shock. The
/// one-sided limits come from the exact m = 0 quadratic branch rather than
/// numerical limits. Fails for tau <= 1/2, where the branches merge and no
/// discontinuity exists.
pub fn check_entropy_jump(tau: f64) -> Result<JumpCheck> {
    let m_plus = positive_root_at_zero(tau);
    if tau.is_nan() || tau <= 0.5 || m_plus == 0.0 {
        return Err(Error::NoShock { tau });
    }
    // The m -> 0- branch root solves the mirrored quadratic; its closed
    // form is the exact negation of M+.
    let m_minus = -m_plus;
    let z_plus = 2.0 * m_plus / (tau * m_plus + 1.0);
    let z_minus = 2.0 * m_minus / (tau * m_minus.abs() + 1.0);
    let jump_ok = z_plus >= 0.0 && (z_plus + z_minus).abs() <= 1e-10;
    let rh_residual = (flux(0.0, z_minus) - flux(0.0, z_plus)).abs();
    Ok(JumpCheck {
        tau,
        z_plus,
        z_minus,
        jump_ok,
        rh_residual,
    })
}

/// Value function of the master equation induced by the entropy solution,
/// together with the flow it generates. Bundles the horizon so that game
/// time `t` and remaining time `tau = T - t` convert consistently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyField {
    horizon: f64,
}

impl EntropyField {
    pub fn new(horizon: f64) -> Self {
        assert!(horizon > 0.0);
        EntropyField { horizon }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn z(&self, tau: f64, m: MeanState) -> f64 {
        entropy_z(tau, m)
    }

    /// U(t, x, m) along the sign-matched characteristic through (t, m):
    /// for m > 0 the x = +1 player rides a positive value gap, so its
    /// optimal rate is zero and U(t, 1, m) = -M; integrating the remaining
    /// component gives U(t, -1, m) = -M + Z. The m < 0 case follows from
    /// the sign-flip symmetry U(t, x, m) = U(t, -x, -m).
    pub fn u(&self, t: f64, x: PlayerState, m: MeanState) -> f64 {
        let tau = self.horizon - t;
        debug_assert!((0.0..=self.horizon + 1e-12).contains(&t));
        let mv = m.value();
        if mv == 0.0 {
            return 0.0;
        }
        let (mv, x) = if mv > 0.0 { (mv, x) } else { (-mv, x.flipped()) };
        let root = positive_branch_root(tau, mv);
        match x {
            PlayerState::Plus => -root,
            PlayerState::Minus => -root + 2.0 * root / (tau * root + 1.0),
        }
    }

    /// U*(t, mu) = U(t, 1, 2 mu - 1), the fraction-variable restriction that
    /// the N-player value functions converge to away from mu = 1/2.
    pub fn u_star(&self, t: f64, mu: f64) -> Result<f64> {
        let m = crate::simplex::fraction_to_mean(mu)?;
        Ok(self.u(t, PlayerState::Plus, m))
    }

    /// Central finite-difference residual of the conservation law at
    /// (tau, m), O(h^2) on the smooth region. Rejects stencils that touch
    /// the shock at m = 0 or leave tau >= 0.
    pub fn pde_residual(&self, tau: f64, m: MeanState, h: f64) -> Result<f64> {
        let mv = m.value();
        if mv.abs() <= h * 1.5 {
            return Err(Error::StencilAtShock { m: mv, h });
        }
        if tau - h < 0.0 {
            return Err(Error::OutOfRange {
                what: "stencil time",
                value: tau - h,
                min: 0.0,
                max: self.horizon,
            });
        }
        let ms = |v: f64| MeanState::new(v).unwrap();
        let dz_dtau = (entropy_z(tau + h, m) - entropy_z(tau - h, m)) / (2.0 * h);
        let dflux_dm = (flux(mv + h, entropy_z(tau, ms(mv + h)))
            - flux(mv - h, entropy_z(tau, ms(mv - h))))
            / (2.0 * h);
        Ok(dz_dtau + dflux_dm)
    }

    /// Integrates the induced forward dynamics
    /// `dm/dt = -m |Z(T-t, m)| + Z(T-t, m)` from `m0 != 0`, sampling the
    /// result on `grid`. The solution preserves the sign of `m0`, has
    /// nondecreasing |m|, and lands on the sign-matched consistency root at
    /// the horizon. A centered start is refused: the field is discontinuous
    /// there and the flow is not unique.
    pub fn induced_flow(&self, m0: MeanState, grid: &TimeGrid) -> Result<InducedFlow> {
        if m0.value() == 0.0 {
            return Err(Error::CenteredStart);
        }
        let horizon = self.horizon;
        debug_assert!((grid.horizon() - horizon).abs() < 1e-12);
        let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
            let m = MeanState::new(y[0].clamp(-1.0, 1.0)).unwrap();
            let z = entropy_z((horizon - t).max(0.0), m);
            dy[0] = -y[0] * z.abs() + z;
        };
        let opts = OdeOptions {
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            max_step: None,
        };
        let rows = integrate_grid(rhs, &[m0.value()], grid.nodes(), &opts)?;
        let means = rows.into_iter().map(|r| r[0]).collect();
        Ok(InducedFlow {
            initial_mean: m0,
            horizon,
            times: grid.nodes().to_vec(),
            means,
        })
    }
}

/// Sampled trajectory of the flow induced by the entropy field.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedFlow {
    pub initial_mean: MeanState,
    pub horizon: f64,
    times: Vec<f64>,
    means: Vec<f64>,
}

impl InducedFlow {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn terminal_mean(&self) -> f64 {
        *self.means.last().unwrap()
    }

    /// Linear interpolation between sampled nodes.
    pub fn mean_at(&self, t: f64) -> f64 {
        interp(&self.times, &self.means, t)
    }
}

/// Piecewise-linear interpolation on a sorted abscissa grid, clamped at the
/// ends.
pub(crate) fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let i = match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => return ys[i],
        Err(i) => i - 1,
    };
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] * (1.0 - w) + ys[i + 1] * w
}
