//! Solutions of the mean field game system
//!
//! ```text
//!     dz/dt = z|z|/2,          z(T) = 2 m(T),
//!     dm/dt = -m|z| + z,       m(0) = m0.
//! ```
//!
//! Solving the backward equation in closed form and inserting it into the
//! forward one reduces the system to a scalar consistency equation for the
//! terminal mean `M = m(T)`:
//!
//! ```text
//!     T^2 M^3 + T(2 - T) M |M| + (1 - 2T) M - m0 = 0.
//! ```
//!
//! The number of roots in [-1, 1] is 1, 2 or 3 depending on how the horizon
//! compares to a threshold `T(m0)`, the unique time in [1/2, 2] at which
//! `|m0| = (2T-1)^2 (T+4) / (27 T)`. Each root yields one closed-form
//! trajectory pair `(z, m)`.

use crate::roots::{bisect, bisect_newton, newton_polish};
use crate::simplex::{MeanState, TimeGrid};
use crate::{Error, Result};

/// Residual level below which a candidate terminal mean counts as a root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;

/// Two nearby roots closer than this collapse into one reported root.
const ROOT_MERGE_TOL: f64 = 1e-9;

/// Horizons within this band of the threshold time are treated as the
/// degenerate double-root case (exact equality is measure-zero in floats).
pub const THRESHOLD_BAND: f64 = 1e-6;

/// Consistency polynomial whose roots are the admissible terminal means.
pub fn consistency_poly(m_terminal: f64, horizon: f64, m0: MeanState) -> f64 {
    let t = horizon;
    let m = m_terminal;
    t * t * m * m * m + t * (2.0 - t) * m * m.abs() + (1.0 - 2.0 * t) * m - m0.value()
}

/// Right-hand side of the threshold equation |m0| = rhs(T).
fn threshold_rhs(t: f64) -> f64 {
    (2.0 * t - 1.0).powi(2) * (t + 4.0) / (27.0 * t)
}

fn threshold_rhs_deriv(t: f64) -> f64 {
    4.0 * (2.0 * t - 1.0) * (t + 1.0).powi(2) / (27.0 * t * t)
}

/// The bifurcation threshold: the unique T in [1/2, 2] with
/// `|m0| = (2T-1)^2 (T+4) / (27T)`. Returns exactly 1/2 for m0 = 0.
pub fn threshold_time(m0: MeanState) -> f64 {
    let target = m0.value().abs();
    if target == 0.0 {
        return 0.5;
    }
    let f = |t: f64| threshold_rhs(t) - target;
    // The bracket signs are asserted rather than assumed: rhs is 0 at 1/2
    // and 1 at 2, and uniqueness on [1/2, 2] is known.
    debug_assert!(f(0.5) <= 0.0 && f(2.0) >= 0.0);
    let t = bisect(&f, 0.5, 2.0, "threshold time").expect("threshold bracket");
    newton_polish(&f, &threshold_rhs_deriv, t, 0.5, 2.0)
}

/// Labels for the solution branches. For m0 > 0 the ascending roots are
/// M1 < M2 < 0 < M3; the sign-matched branch always carries the label M3,
/// so for m0 < 0 the ascending order is M3 < M2 < M1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchLabel {
    M1,
    M2,
    M3,
}

impl std::fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BranchLabel::M1 => write!(f, "M1"),
            BranchLabel::M2 => write!(f, "M2"),
            BranchLabel::M3 => write!(f, "M3"),
        }
    }
}

/// One admissible terminal mean together with its label and residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledRoot {
    pub label: BranchLabel,
    pub value: f64,
    pub residual: f64,
}

/// All admissible terminal means for a given horizon and initial mean,
/// sorted ascending by value.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyRoots {
    pub horizon: f64,
    pub initial_mean: MeanState,
    pub roots: Vec<LabeledRoot>,
}

impl ConsistencyRoots {
    pub fn count(&self) -> usize {
        self.roots.len()
    }

    pub fn by_label(&self, label: BranchLabel) -> Option<&LabeledRoot> {
        self.roots.iter().find(|r| r.label == label)
    }

    /// The branch selected in the large-N limit: sign-matched with m0.
    pub fn sign_matched(&self) -> &LabeledRoot {
        self.by_label(BranchLabel::M3)
            .expect("M3 exists for every input")
    }
}

/// Positive side of the sign-split cubic: the polynomial with |M| = M.
fn f_plus(m: f64, t: f64, m0: f64) -> f64 {
    t * t * m * m * m + t * (2.0 - t) * m * m + (1.0 - 2.0 * t) * m - m0
}

fn f_plus_deriv(m: f64, t: f64) -> f64 {
    3.0 * t * t * m * m + 2.0 * t * (2.0 - t) * m + 1.0 - 2.0 * t
}

/// Unique root of `f_plus(., t, m0) = 0` in [0, 1] on the increasing piece
/// to the right of the critical point (2t-1)/(3t). Requires m0 >= 0; for
/// m0 = 0 this is the strictly positive branch root (0 for t <= 1/2).
pub(crate) fn positive_branch_root(t: f64, m0: f64) -> f64 {
    debug_assert!(m0 >= 0.0);
    if t == 0.0 {
        return m0;
    }
    if m0 == 0.0 {
        return positive_root_at_zero(t);
    }
    if m0 >= 1.0 {
        // M = 1 solves the cubic exactly for m0 = 1; the generic path can
        // lose the bracket to cancellation in f(1) = 1 - m0.
        return 1.0;
    }
    let crit = ((2.0 * t - 1.0) / (3.0 * t)).clamp(0.0, 1.0);
    let f = |m: f64| f_plus(m, t, m0);
    let df = |m: f64| f_plus_deriv(m, t);
    // f(crit) <= -m0 < 0 and f(1) = 1 - m0 >= 0.
    bisect_newton(&f, &df, crit, 1.0, "positive consistency root")
        .expect("positive branch bracket")
}

/// Positive root of the m0 = 0 factorization t^2 M^2 + t(2-t) M + (1-2t) = 0,
/// i.e. M+ = ((t-2) + sqrt(t^2 + 4t)) / (2t); zero for t <= 1/2.
pub(crate) fn positive_root_at_zero(t: f64) -> f64 {
    if t <= 0.5 {
        return 0.0;
    }
    ((t - 2.0) + (t * t + 4.0 * t).sqrt()) / (2.0 * t)
}

/// Enumerates every root of the consistency polynomial in [-1, 1].
///
/// Root finding is done on the two sign-split cubics separately, with
/// bisection brackets delimited by their critical points and a Newton
/// polish. Horizons within [`THRESHOLD_BAND`] of the threshold time are
/// classified as the fold: the double root sits exactly at the critical
/// point -(2T-1)/(3T) (times the sign of -m0) and is reported once.
pub fn enumerate_terminal_means(horizon: f64, m0: MeanState) -> ConsistencyRoots {
    let t = horizon;
    assert!(t > 0.0, "horizon must be positive");
    let m0v = m0.value();

    if m0v < 0.0 {
        // Mirror: roots(T, -m0) are the negated roots of roots(T, m0),
        // with labels preserved.
        let mirrored = enumerate_terminal_means(horizon, MeanState::new(-m0v).unwrap());
        let mut roots: Vec<LabeledRoot> = mirrored
            .roots
            .into_iter()
            .map(|r| LabeledRoot {
                label: r.label,
                value: -r.value,
                residual: consistency_poly(-r.value, t, m0),
            })
            .collect();
        roots.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
        return ConsistencyRoots {
            horizon,
            initial_mean: m0,
            roots,
        };
    }

    let mut roots = Vec::with_capacity(3);
    let residual = |m: f64| consistency_poly(m, t, m0);

    if m0v == 0.0 {
        // Exact factorization M (t^2 M^2 + t(2-t) M + 1 - 2t) = 0 on M >= 0.
        let m_plus = positive_root_at_zero(t);
        if m_plus > ROOT_MERGE_TOL {
            roots.push(LabeledRoot {
                label: BranchLabel::M1,
                value: -m_plus,
                residual: residual(-m_plus),
            });
            roots.push(LabeledRoot {
                label: BranchLabel::M2,
                value: 0.0,
                residual: 0.0,
            });
            roots.push(LabeledRoot {
                label: BranchLabel::M3,
                value: m_plus,
                residual: residual(m_plus),
            });
        } else {
            roots.push(LabeledRoot {
                label: BranchLabel::M3,
                value: 0.0,
                residual: 0.0,
            });
        }
        return ConsistencyRoots {
            horizon,
            initial_mean: m0,
            roots,
        };
    }

    // m0 > 0: the sign-matched root M3 on the positive half-line.
    let m3 = positive_branch_root(t, m0v);
    roots.push(LabeledRoot {
        label: BranchLabel::M3,
        value: m3,
        residual: residual(m3),
    });

    // Negative half-line: f_minus(M) = -f_plus(-M; -m0), so negative roots
    // are the negated positive roots of the cubic with initial mean -m0.
    // They exist only past the threshold; inside the band the pair is the
    // fold double root at the critical point -(2T-1)/(3T).
    let t_c = threshold_time(m0);
    let crit = (2.0 * t - 1.0) / (3.0 * t);
    if (t - t_c).abs() <= THRESHOLD_BAND {
        let fold = -crit;
        roots.push(LabeledRoot {
            label: BranchLabel::M1,
            value: fold,
            residual: residual(fold),
        });
    } else if t > t_c {
        // Two sign changes around the interior minimum of f_plus(.; -m0):
        // f(0) = m0 > 0, f(crit) < 0, f(1) = 1 + m0 > 0.
        let f = |m: f64| f_plus(m, t, -m0v);
        let df = |m: f64| f_plus_deriv(m, t);
        let inner = bisect_newton(&f, &df, 0.0, crit, "inner negative root")
            .expect("fold left bracket");
        let outer = bisect_newton(&f, &df, crit, 1.0, "outer negative root")
            .expect("fold right bracket");
        if (outer - inner).abs() <= ROOT_MERGE_TOL {
            let fold = 0.5 * (inner + outer);
            roots.push(LabeledRoot {
                label: BranchLabel::M1,
                value: -fold,
                residual: residual(-fold),
            });
        } else {
            roots.push(LabeledRoot {
                label: BranchLabel::M2,
                value: -inner,
                residual: residual(-inner),
            });
            roots.push(LabeledRoot {
                label: BranchLabel::M1,
                value: -outer,
                residual: residual(-outer),
            });
        }
    }

    roots.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    ConsistencyRoots {
        horizon,
        initial_mean: m0,
        roots,
    }
}

/// Closed-form solution pair (z, m) on [0, T] for one consistency branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfgTrajectory {
    horizon: f64,
    initial_mean: f64,
    terminal_mean: f64,
}

impl MfgTrajectory {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn initial_mean(&self) -> f64 {
        self.initial_mean
    }

    pub fn terminal_mean(&self) -> f64 {
        self.terminal_mean
    }

    /// z(t) = 2M / (|M|(T - t) + 1).
    pub fn z(&self, t: f64) -> f64 {
        let m_t = self.terminal_mean;
        2.0 * m_t / (m_t.abs() * (self.horizon - t) + 1.0)
    }

    /// m(t) = (m0 - sgn M) ((|M|(T-t) + 1) / (|M|T + 1))^2 + sgn M; the
    /// M = 0 branch degenerates to the constant flow.
    pub fn mean(&self, t: f64) -> f64 {
        let m_t = self.terminal_mean;
        if m_t == 0.0 {
            return self.initial_mean;
        }
        let s = m_t.signum();
        let ratio = (m_t.abs() * (self.horizon - t) + 1.0) / (m_t.abs() * self.horizon + 1.0);
        (self.initial_mean - s) * ratio * ratio + s
    }
}

/// Builds the closed-form trajectory for a consistency root `m_terminal`.
/// Rejects values that fail the root residual check, and M = 0 with a
/// noncentered start (the constant flow is only consistent from m0 = 0).
pub fn build_trajectory(horizon: f64, m0: MeanState, m_terminal: f64) -> Result<MfgTrajectory> {
    let residual = consistency_poly(m_terminal, horizon, m0);
    if residual.abs() > 1e-8 {
        return Err(Error::NotARoot {
            m_terminal,
            residual,
        });
    }
    if m_terminal == 0.0 && m0.value() != 0.0 {
        return Err(Error::NotARoot {
            m_terminal,
            residual: m0.value(),
        });
    }
    Ok(MfgTrajectory {
        horizon,
        initial_mean: m0.value(),
        terminal_mean: m_terminal,
    })
}

/// Maximum central-difference residual of the MFG system along the grid:
/// `max(|dz/dt - z|z|/2|, |dm/dt - (-m|z| + z)|)` over interior nodes.
/// Second order in the grid gap for these smooth closed forms.
pub fn verify_mfg_residual(traj: &MfgTrajectory, grid: &TimeGrid) -> f64 {
    let nodes = grid.nodes();
    let mut worst = 0.0f64;
    for w in nodes.windows(3) {
        let (tl, tc, tr) = (w[0], w[1], w[2]);
        let dz = (traj.z(tr) - traj.z(tl)) / (tr - tl);
        let dm = (traj.mean(tr) - traj.mean(tl)) / (tr - tl);
        let z = traj.z(tc);
        let m = traj.mean(tc);
        worst = worst
            .max((dz - 0.5 * z * z.abs()).abs())
            .max((dm - (-m * z.abs() + z)).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn mean(v: f64) -> MeanState {
        MeanState::new(v).unwrap()
    }

    /// At T = 2 the |M| term drops and the consistency equation is the
    /// plain cubic 4M^3 - 3M = m0, solved exactly by the triple-angle
    /// identity. Independent oracle for every T = 2 root test.
    fn trig_roots_t2(m0: f64) -> [f64; 3] {
        let phi = m0.acos();
        let mut r = [
            ((phi + 2.0 * std::f64::consts::PI) / 3.0).cos(),
            ((phi + 4.0 * std::f64::consts::PI) / 3.0).cos(),
            (phi / 3.0).cos(),
        ];
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        r
    }

    #[test]
    fn poly_examples() {
        assert_eq!(consistency_poly(0.0, 2.0, mean(0.0)), 0.0);
        let v = consistency_poly(3f64.sqrt() / 2.0, 2.0, mean(0.0));
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(consistency_poly(1.0, 1.0, mean(0.0)), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_time(mean(0.0)), 0.5);
        assert_abs_diff_eq!(threshold_time(mean(1.0)), 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(threshold_time(mean(5.0 / 27.0)), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn roots_at_symmetric_start() {
        let r = enumerate_terminal_means(2.0, mean(0.0));
        assert_eq!(r.count(), 3);
        let s3 = 3f64.sqrt() / 2.0;
        assert_abs_diff_eq!(r.roots[0].value, -s3, epsilon = 1e-12);
        assert_abs_diff_eq!(r.roots[1].value, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.roots[2].value, s3, epsilon = 1e-12);

        let r1 = enumerate_terminal_means(1.0, mean(0.0));
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert_abs_diff_eq!(r1.roots[2].value, golden, epsilon = 1e-12);
        assert_abs_diff_eq!(r1.roots[0].value, -golden, epsilon = 1e-12);
    }

    #[test]
    fn single_root_below_threshold() {
        let r = enumerate_terminal_means(0.4, mean(0.3));
        assert_eq!(r.count(), 1);
        assert_eq!(r.roots[0].label, BranchLabel::M3);
        assert!(r.roots[0].value > 0.0);
        assert!(r.roots[0].residual.abs() <= ROOT_RESIDUAL_TOL);
    }

    #[test]
    fn trig_oracle_at_t2() {
        for &m0 in &[0.05, 0.2, 0.5, 0.9] {
            let r = enumerate_terminal_means(2.0, mean(m0));
            assert_eq!(r.count(), 3, "m0 = {m0}");
            let expect = trig_roots_t2(m0);
            for (got, want) in r.roots.iter().zip(expect.iter()) {
                assert_abs_diff_eq!(got.value, *want, epsilon = 1e-12);
            }
            assert_eq!(r.roots[2].label, BranchLabel::M3);
        }
    }

    #[test]
    fn fold_produces_two_roots() {
        for &m0 in &[0.1, 0.3, 0.6, 0.9] {
            let tc = threshold_time(mean(m0));
            let r = enumerate_terminal_means(tc, mean(m0));
            assert_eq!(r.count(), 2, "m0 = {m0}");
            for root in &r.roots {
                assert!(
                    root.residual.abs() <= ROOT_RESIDUAL_TOL,
                    "residual {} at m0 = {m0}",
                    root.residual
                );
            }
        }
    }

    #[test]
    fn sign_structure_past_threshold() {
        // M3 > 0 while M1, M2 < 0 for a positive start.
        let r = enumerate_terminal_means(2.0, mean(0.2));
        assert!(r.by_label(BranchLabel::M3).unwrap().value > 0.0);
        assert!(r.by_label(BranchLabel::M1).unwrap().value < 0.0);
        assert!(r.by_label(BranchLabel::M2).unwrap().value < 0.0);
        // Mirrored start flips the signs and keeps labels.
        let rm = enumerate_terminal_means(2.0, mean(-0.2));
        assert!(rm.by_label(BranchLabel::M3).unwrap().value < 0.0);
        assert!(rm.by_label(BranchLabel::M1).unwrap().value > 0.0);
    }

    #[test]
    fn branch_monotonicity_in_initial_mean() {
        // For fixed T past the threshold, M3 is nondecreasing in m while
        // M2 is nonincreasing and M1 nondecreasing, and the chain
        // M3(m) > M+ = |M-| > |M1(m)| > |M2(m)| > 0 holds on (0, m0].
        let t = 2.0;
        let m0 = 0.5;
        let m_plus = enumerate_terminal_means(t, mean(0.0)).roots[2].value;
        let mut prev: Option<(f64, f64, f64)> = None;
        for i in 1..=20 {
            let m = m0 * i as f64 / 20.0;
            let r = enumerate_terminal_means(t, mean(m));
            let m1 = r.by_label(BranchLabel::M1).unwrap().value;
            let m2 = r.by_label(BranchLabel::M2).unwrap().value;
            let m3 = r.by_label(BranchLabel::M3).unwrap().value;
            assert!(m3 > m_plus && m_plus > m1.abs() && m1.abs() > m2.abs() && m2.abs() > 0.0);
            if let Some((p1, p2, p3)) = prev {
                assert!(m3 >= p3 - 1e-12);
                assert!(m2 <= p2 + 1e-12);
                assert!(m1 >= p1 - 1e-12);
            }
            prev = Some((m1, m2, m3));
            // Both negative roots straddle the critical point q, and M2
            // sits closer to it than M1.
            let q = -(2.0 * t - 1.0) / (3.0 * t);
            assert!(m1 < q && q < m2 && m2 < 0.0);
            assert!((m2 - q).abs() > (m1 - q).abs());
        }
    }

    #[test]
    fn trajectory_endpoints() {
        let s3 = 3f64.sqrt() / 2.0;
        let traj = build_trajectory(2.0, mean(0.0), s3).unwrap();
        assert_abs_diff_eq!(traj.z(2.0), 3f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(traj.mean(2.0), s3, epsilon = 1e-12);
        assert_abs_diff_eq!(traj.mean(0.0), 0.0, epsilon = 1e-12);
        let z0 = 3f64.sqrt() / (3f64.sqrt() + 1.0);
        assert_abs_diff_eq!(traj.z(0.0), z0, epsilon = 1e-12);

        let zero = build_trajectory(2.0, mean(0.0), 0.0).unwrap();
        assert_eq!(zero.z(1.3), 0.0);
        assert_eq!(zero.mean(0.7), 0.0);
    }

    #[test]
    fn trajectory_rejects_non_roots() {
        assert!(build_trajectory(2.0, mean(0.0), 0.5).is_err());
        assert!(build_trajectory(2.0, mean(0.3), 0.0).is_err());
    }

    #[test]
    fn residual_is_second_order() {
        let s3 = 3f64.sqrt() / 2.0;
        let traj = build_trajectory(2.0, mean(0.0), s3).unwrap();

        let zero = build_trajectory(2.0, mean(0.0), 0.0).unwrap();
        let grid = TimeGrid::uniform(2.0, 1e-3).unwrap();
        assert_eq!(verify_mfg_residual(&zero, &grid), 0.0);

        let r_fine = verify_mfg_residual(&traj, &grid);
        assert!(r_fine <= 1e-5, "residual {r_fine}");

        let r_h = verify_mfg_residual(&traj, &TimeGrid::uniform(2.0, 1e-2).unwrap());
        let r_h2 = verify_mfg_residual(&traj, &TimeGrid::uniform(2.0, 5e-3).unwrap());
        let ratio = r_h / r_h2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    proptest! {
        #[test]
        fn root_residuals_and_sign_symmetry(
            m0 in -0.999f64..=0.999,
            t in 0.05f64..=3.0,
        ) {
            // Stay off the degeneracy band, where residuals are only as
            // good as the band width.
            let tc = threshold_time(mean(m0));
            prop_assume!((t - tc).abs() > 10.0 * THRESHOLD_BAND);

            let r = enumerate_terminal_means(t, mean(m0));
            for root in &r.roots {
                prop_assert!(root.residual.abs() <= ROOT_RESIDUAL_TOL);
                prop_assert!(root.value.abs() <= 1.0 + 1e-12);
            }
            let expected = if t < tc { 1 } else { 3 };
            prop_assert_eq!(r.count(), expected);

            let rm = enumerate_terminal_means(t, mean(-m0));
            prop_assert_eq!(rm.count(), r.count());
            for (a, b) in r.roots.iter().zip(rm.roots.iter().rev()) {
                prop_assert!((a.value + b.value).abs() <= 1e-10);
            }
        }

        #[test]
        fn trajectory_consistency(m0 in -0.95f64..=0.95, t in 0.6f64..=2.5) {
            let roots = enumerate_terminal_means(t, mean(m0));
            for root in &roots.roots {
                if root.value == 0.0 && m0 != 0.0 { continue; }
                let traj = build_trajectory(t, mean(m0), root.value).unwrap();
                prop_assert!((traj.mean(t) - root.value).abs() <= 1e-9);
                prop_assert!((traj.z(t) - 2.0 * traj.mean(t)).abs() <= 1e-9);
                prop_assert!((traj.mean(0.0) - m0).abs() <= 1e-9);
            }
        }
    }
}
