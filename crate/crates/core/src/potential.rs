//! The deterministic control view: steering the population law
//! `(m_1, m_{-1})` on the simplex at running cost `m_1 a_1^2/2 +
//! m_{-1} a_{-1}^2/2` toward the terminal reward `-(m_1 - m_{-1})^2 / 2`.
//! The MFG system is the Pontryagin condition of this problem, each
//! consistency branch has the closed-form cost
//!
//! ```text
//!     phi(M) = M^2 (T - 1/2 - T |M|),
//! ```
//!
//! and the branch the N-player game selects is the global minimizer: the
//! sign-matched root M3 when the start is off-center, a symmetric tie
//! between the two escaping branches when it is centered.

use crate::mfg::{
    enumerate_terminal_means, BranchLabel, ConsistencyRoots, MfgTrajectory,
};
use crate::quad;
use crate::simplex::{negative_part, positive_part, MeanState};

/// Closed-form cost of the branch with terminal mean `M`.
pub fn phi(m_terminal: f64, horizon: f64) -> f64 {
    m_terminal * m_terminal * (horizon - 0.5 - horizon * m_terminal.abs())
}

/// Cost of one labeled branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCost {
    pub label: BranchLabel,
    pub terminal_mean: f64,
    pub cost: f64,
}

/// Costs of every branch at (T, m0), with the minimizer singled out.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchCosts {
    pub horizon: f64,
    pub initial_mean: MeanState,
    pub entries: Vec<BranchCost>,
    pub argmin: BranchLabel,
    /// True iff another branch matches the minimum cost to machine
    /// precision (the centered start).
    pub tie: bool,
}

/// Evaluates `phi` on every consistency root. Fewer than three branches
/// (short horizons, the fold) are handled by scoring whatever exists.
pub fn branch_costs(horizon: f64, m0: MeanState) -> BranchCosts {
    let roots: ConsistencyRoots = enumerate_terminal_means(horizon, m0);
    let entries: Vec<BranchCost> = roots
        .roots
        .iter()
        .map(|r| BranchCost {
            label: r.label,
            terminal_mean: r.value,
            cost: phi(r.value, horizon),
        })
        .collect();
    let argmin = entries
        .iter()
        .min_by(|a, b| a.cost.partial_cmp(&b.cost).unwrap())
        .expect("at least one branch")
        .label;
    let min_cost = entries
        .iter()
        .find(|e| e.label == argmin)
        .unwrap()
        .cost;
    let tie = entries
        .iter()
        .filter(|e| e.label != argmin)
        .any(|e| (e.cost - min_cost).abs() <= f64::EPSILON.max(1e-15 * min_cost.abs()));
    BranchCosts {
        horizon,
        initial_mean: m0,
        entries,
        argmin,
        tie,
    }
}

/// Independent check of the closed-form cost: integrates the running cost
/// along the trajectory by adaptive quadrature and adds the terminal
/// reward. Agrees with `phi` to the quadrature tolerance.
pub fn cost_quadrature(traj: &MfgTrajectory) -> f64 {
    let horizon = traj.horizon();
    let integrand = |t: f64| {
        let z = traj.z(t);
        let m = traj.mean(t);
        let m_plus = 0.5 * (1.0 + m);
        let m_minus = 0.5 * (1.0 - m);
        let a_plus = negative_part(z);
        let a_minus = positive_part(z);
        0.5 * (m_plus * a_plus * a_plus + m_minus * a_minus * a_minus)
    };
    let running = quad::integrate(&integrand, 0.0, horizon, 1e-10);
    let m_end = traj.mean(horizon);
    running - 0.5 * m_end * m_end
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mfg::build_trajectory;
    use approx::assert_abs_diff_eq;

    fn mean(v: f64) -> MeanState {
        MeanState::new(v).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(0.0, 2.0), 0.0);
        let v = phi(3f64.sqrt() / 2.0, 2.0);
        assert_abs_diff_eq!(v, 0.75 * (1.5 - 3f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(v, -0.17403810567665795, epsilon = 1e-14);
        assert_eq!(phi(0.6, 1.7), phi(-0.6, 1.7));
    }

    #[test]
    fn centered_start_ties_the_escaping_branches() {
        let costs = branch_costs(2.0, mean(0.0));
        assert_eq!(costs.entries.len(), 3);
        assert!(costs.tie);
        let by = |l| {
            costs
                .entries
                .iter()
                .find(|e: &&BranchCost| e.label == l)
                .unwrap()
                .cost
        };
        let plus = by(BranchLabel::M3);
        let minus = by(BranchLabel::M1);
        let zero = by(BranchLabel::M2);
        assert_eq!(plus, minus);
        assert!(plus < zero && zero == 0.0);
        assert_abs_diff_eq!(plus, -0.17403810567665795, epsilon = 1e-12);
    }

    #[test]
    fn off_center_ordering_and_argmin() {
        for &m0 in &[0.05, 0.2, 0.5] {
            let costs = branch_costs(2.0, mean(m0));
            let by = |l| {
                costs
                    .entries
                    .iter()
                    .find(|e: &&BranchCost| e.label == l)
                    .unwrap()
                    .cost
            };
            assert!(by(BranchLabel::M3) < by(BranchLabel::M1));
            assert!(by(BranchLabel::M1) < by(BranchLabel::M2));
            assert!(by(BranchLabel::M2) > 0.0);
            assert_eq!(costs.argmin, BranchLabel::M3);
            assert!(!costs.tie);

            // Mirrored start selects the mirrored (still sign-matched)
            // branch with identical costs.
            let mirrored = branch_costs(2.0, mean(-m0));
            assert_eq!(mirrored.argmin, BranchLabel::M3);
            for (a, b) in costs.entries.iter().zip(mirrored.entries.iter().rev()) {
                assert_abs_diff_eq!(a.cost, b.cost, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_matches_phi() {
        // Zero branch: zero rates, zero terminal reward.
        let zero = build_trajectory(2.0, mean(0.0), 0.0).unwrap();
        assert_eq!(cost_quadrature(&zero), 0.0);

        for &(t, m0) in &[(2.0, 0.0), (1.0, 0.0), (2.0, 0.2), (1.6, 0.45), (2.0, -0.3)] {
            let roots = enumerate_terminal_means(t, mean(m0));
            for root in &roots.roots {
                if root.value == 0.0 && m0 != 0.0 {
                    continue;
                }
                let traj = build_trajectory(t, mean(m0), root.value).unwrap();
                let quad_cost = cost_quadrature(&traj);
                let closed = phi(root.value, t);
                assert!(
                    (quad_cost - closed).abs() <= 1e-8,
                    "branch {} at (T={t}, m0={m0}): {quad_cost} vs {closed}",
                    root.label
                );
            }
        }
    }

    #[test]
    fn golden_branch_cost_at_unit_horizon() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let traj = build_trajectory(1.0, mean(0.0), golden).unwrap();
        assert_abs_diff_eq!(cost_quadrature(&traj), phi(golden, 1.0), epsilon = 1e-9);
    }
}
