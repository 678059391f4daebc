//! Domain types shared by every module: means on the two-point state space,
//! player states, exact simplex fractions, time grids, and the Hamiltonian.

use crate::{Error, Result, BOUNDS_TOL};

/// A probability on {-1, +1} represented by its mean `m` in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MeanState(f64);

impl MeanState {
    /// Builds a mean, clamping sub-tolerance overshoot of [-1, 1] and
    /// rejecting anything worse (ODE output may overshoot by rounding).
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() || m.abs() > 1.0 + BOUNDS_TOL {
            return Err(Error::OutOfRange {
                what: "mean",
                value: m,
                min: -1.0,
                max: 1.0,
            });
        }
        Ok(MeanState(m.clamp(-1.0, 1.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// State of a single player: one of {-1, +1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlayerState {
    Plus,
    Minus,
}

impl PlayerState {
    pub fn value(self) -> f64 {
        match self {
            PlayerState::Plus => 1.0,
            PlayerState::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            PlayerState::Plus => PlayerState::Minus,
            PlayerState::Minus => PlayerState::Plus,
        }
    }
}

/// A point k/n of the discrete simplex S_n = {0, 1/n, ..., 1}, stored as the
/// exact integer pair so neighbor shifts and the complement 1 - k/n never
/// drift off the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SimplexFraction {
    k: usize,
    n: usize,
}

impl SimplexFraction {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if n == 0 || k > n {
            return Err(Error::OutOfRange {
                what: "simplex count",
                value: k as f64,
                min: 0.0,
                max: n as f64,
            });
        }
        Ok(SimplexFraction { k, n })
    }

    pub fn count(self) -> usize {
        self.k
    }

    pub fn denominator(self) -> usize {
        self.n
    }

    pub fn value(self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// The complementary fraction 1 - k/n, exact on the grid.
    pub fn complement(self) -> Self {
        SimplexFraction {
            k: self.n - self.k,
            n: self.n,
        }
    }

    pub fn up(self) -> Result<Self> {
        if self.k == self.n {
            Err(Error::NoNeighbor { k: self.k, n: self.n })
        } else {
            Ok(SimplexFraction { k: self.k + 1, n: self.n })
        }
    }

    pub fn down(self) -> Result<Self> {
        if self.k == 0 {
            Err(Error::NoNeighbor { k: self.k, n: self.n })
        } else {
            Ok(SimplexFraction { k: self.k - 1, n: self.n })
        }
    }
}

/// Strictly increasing time nodes from 0 to the horizon with a bound on the
/// largest gap.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
}

impl TimeGrid {
    /// Uniform grid over [0, T] with gaps no larger than `max_step`.
    pub fn uniform(horizon: f64, max_step: f64) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 || !max_step.is_finite() || max_step <= 0.0 {
            return Err(Error::OutOfRange {
                what: "grid horizon/step",
                value: horizon.min(max_step),
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        let n = (horizon / max_step).ceil() as usize;
        let n = n.max(1);
        let nodes = (0..=n).map(|i| horizon * i as f64 / n as f64).collect();
        Ok(TimeGrid { nodes })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let ok = nodes.len() >= 2
            && nodes[0] == 0.0
            && nodes.windows(2).all(|w| w[1] > w[0]);
        if !ok {
            return Err(Error::OutOfRange {
                what: "grid nodes",
                value: f64::NAN,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        Ok(TimeGrid { nodes })
    }

    pub fn horizon(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn max_gap(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

/// Negative part p^- = max(-p, 0).
#[inline]
pub fn negative_part(p: f64) -> f64 {
    (-p).max(0.0)
}

/// Positive part p^+ = max(p, 0).
#[inline]
pub fn positive_part(p: f64) -> f64 {
    p.max(0.0)
}

/// Hamiltonian H(p) = (p^-)^2 / 2 of the quadratic-cost flip control.
#[inline]
pub fn hamiltonian(p: f64) -> f64 {
    let neg = negative_part(p);
    0.5 * neg * neg
}

/// Maximizer a*(p) = p^- of the Hamiltonian: the optimal flip rate given the
/// value difference p toward the other state.
#[inline]
pub fn optimal_rate(p: f64) -> f64 {
    negative_part(p)
}

/// Terminal cost G(x, m) = -m x: alignment with the majority is rewarded.
#[inline]
pub fn terminal_cost(x: PlayerState, m: MeanState) -> f64 {
    -m.value() * x.value()
}

/// Lasry-Lions monotonicity pairing of G at (m, m2); equals -(m - m2)^2,
/// which is <= 0: the terminal cost is anti-monotonic.
#[inline]
pub fn monotonicity_gap(m: MeanState, m2: MeanState) -> f64 {
    let d = m.value() - m2.value();
    -d * d
}

/// Fraction of +1 mass, mu = (1 + m) / 2.
#[inline]
pub fn mean_to_fraction(m: MeanState) -> f64 {
    0.5 * (1.0 + m.value())
}

/// Inverse of [`mean_to_fraction`]: m = 2 mu - 1.
pub fn fraction_to_mean(mu: f64) -> Result<MeanState> {
    if !mu.is_finite() || !(-BOUNDS_TOL..=1.0 + BOUNDS_TOL).contains(&mu) {
        return Err(Error::OutOfRange {
            what: "fraction",
            value: mu,
            min: 0.0,
            max: 1.0,
        });
    }
    MeanState::new(2.0 * mu.clamp(0.0, 1.0) - 1.0)
}
