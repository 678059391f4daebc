//! Numerical laboratory for a symmetric two-state game in continuous time
//! whose mean field limit has multiple solutions.
//!
//! Players occupy states {-1, +1}, control their flip rates at quadratic
//! running cost, and pay the anti-monotonic terminal cost `-m x`, where `m`
//! is the population mean. Past a critical horizon the mean field game
//! system has three solutions; the large-`N` Nash equilibrium singles one
//! of them out. This crate implements every computable object involved in
//! that selection story and cross-validates them against each other:
//!
//! * [`simplex`] — domain types, the Hamiltonian `H(p) = (p^-)^2 / 2`, and
//!   the terminal cost;
//! * [`mfg`] — all solutions of the mean field game system via the
//!   consistency cubic, the bifurcation threshold, closed-form trajectories;
//! * [`entropy`] — the entropy solution of the master equation written as a
//!   scalar conservation law, its shock conditions, the value function it
//!   induces, and the sign-preserving induced flow;
//! * [`nash`] — the backward ODE system for the symmetric `N+1`-player value
//!   function, the Nash feedback rates, and convergence diagnostics;
//! * [`sim`] — event-driven simulation of the Nash dynamics coupled to the
//!   i.i.d. limit process through shared uniformization clocks;
//! * [`potential`] — the deterministic control problem whose minimizer the
//!   `N`-player game selects.
//!
//! Monte Carlo replications and batch solves run on rayon when the default
//! `parallel` feature is enabled; disabling it yields a sequential build
//! with identical output (every replication owns a counter-derived RNG
//! stream, so results do not depend on scheduling).

pub mod entropy;
pub mod mfg;
pub mod nash;
pub mod ode;
pub mod par;
pub mod potential;
pub mod quad;
pub mod roots;
pub mod sim;
pub mod simplex;

use thiserror::Error;

/// Errors surfaced by solvers, simulators and validators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A mean / fraction / time argument violated its structural bounds
    /// by more than the clamping tolerance.
    #[error("{what} = {value} outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    /// A terminal mean passed to a trajectory builder is not a root of the
    /// consistency cubic.
    #[error("M = {m_terminal} is not a consistency root (residual {residual:.3e})")]
    NotARoot { m_terminal: f64, residual: f64 },
    /// Bracketing failed: no sign change on the stated interval.
    #[error("no sign change on [{lo}, {hi}] while solving {what}")]
    NoBracket { what: &'static str, lo: f64, hi: f64 },
    /// The adaptive integrator underflowed its step size.
    #[error("ODE step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    /// The entropy field has no discontinuity at this time.
    #[error("no shock at remaining time tau = {tau} (requires tau > 1/2)")]
    NoShock { tau: f64 },
    /// A finite-difference stencil would straddle the shock at m = 0.
    #[error("stencil at m = {m} with h = {h} straddles the discontinuity")]
    StencilAtShock { m: f64, h: f64 },
    /// The induced flow is not uniquely defined from a centered start.
    #[error("induced flow undefined for m0 = 0 (multiple solutions)")]
    CenteredStart,
    /// A simulated jump rate exceeded the dominating uniformization rate.
    #[error("rate {rate} exceeds dominating rate {bound} at t = {t}")]
    RateBound { rate: f64, bound: f64, t: f64 },
    /// Operation needs an interior simplex point.
    #[error("fraction index {k} of {n} has no neighbor in that direction")]
    NoNeighbor { k: usize, n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Tolerance for structural bound checks (|m| <= 1 and the like); violations
/// below it are clamped, above it rejected.
pub const BOUNDS_TOL: f64 = 1e-12;
