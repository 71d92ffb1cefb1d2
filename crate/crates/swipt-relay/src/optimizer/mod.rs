//! Flight-time optimization over the harvesting parameters.
//!
//! After reduction (see [`reduction`]) the mission collapses to a small
//! linear program over the battery efficiency and the power-splitting
//! coefficient on the unit square:
//!
//! ```text
//! maximize   sum_k (1 - eta_ps) gain_k / noise
//! subject to eta_ps * eta_bat * G1 - e_threshold * eta_bat + G2 >= 0   (c1)
//!            0 <= eta_bat <= 1                                         (c2)
//!            0 <= eta_ps  <= 1                                         (c3)
//! ```
//!
//! with `G1 = p_t_users * sum_k gain_k` and `G2 = battery_initial -
//! e_threshold`. Three solvers are provided: a published closed-form
//! candidate kept for auditing, an exhaustive lattice oracle, and a derived
//! piecewise closed form validated against the oracle.

pub mod kkt;
pub mod reduction;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::deployment::UserDeployment;
use crate::error::{Error, Result};
use crate::scenario::MissionConfig;
use crate::swipt::SwiptConfig;

/// Feasibility slack used when classifying solutions.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// The reduced harvesting program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationProblem {
    /// `p_t_users * sum_k gain_k`, joule-scale constant of c1.
    pub g1: f64,
    /// `battery_initial - e_threshold`.
    pub g2: f64,
    pub e_threshold: f64,
    /// Per-user path gains `slant_range^(-alpha)`.
    pub per_user_gains: Vec<f64>,
    pub noise_uplink: f64,
    pub p_t_users: f64,
}

impl OptimizationProblem {
    /// Objective value at the given split (independent of the battery
    /// efficiency as the reduced program is written).
    pub fn objective(&self, eta_ps: f64) -> f64 {
        let gain_sum: f64 = self.per_user_gains.iter().sum();
        (1.0 - eta_ps) * gain_sum / self.noise_uplink
    }

    /// Residual of the harvesting constraint c1; feasible iff nonnegative.
    pub fn harvest_constraint(&self, eta_bat: f64, eta_ps: f64) -> f64 {
        eta_ps * eta_bat * self.g1 - self.e_threshold * eta_bat + self.g2
    }

    /// All three constraints within tolerance.
    pub fn is_feasible(&self, eta_bat: f64, eta_ps: f64) -> bool {
        let tol = FEASIBILITY_TOL * (1.0 + self.g1.abs() + self.g2.abs() + self.e_threshold);
        self.harvest_constraint(eta_bat, eta_ps) >= -tol
            && (-FEASIBILITY_TOL..=1.0 + FEASIBILITY_TOL).contains(&eta_bat)
            && (-FEASIBILITY_TOL..=1.0 + FEASIBILITY_TOL).contains(&eta_ps)
    }

    /// Synthetic single-gain problem with `p_t_users = 1`, so `g1` is the
    /// lone gain. Convenient for randomized studies of the program itself.
    pub fn from_constants(
        g1: f64,
        e_threshold: f64,
        battery_initial: f64,
        noise_uplink: f64,
    ) -> Self {
        Self {
            g1,
            g2: battery_initial - e_threshold,
            e_threshold,
            per_user_gains: vec![g1],
            noise_uplink,
            p_t_users: 1.0,
        }
    }
}

/// Which solver produced a [`Solution`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionSource {
    /// The published closed-form candidate (audited, not trusted).
    ClosedForm,
    /// Exhaustive lattice scan.
    Grid,
    /// Derived piecewise closed form.
    Analytic,
}

/// A candidate optimum with its feasibility classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub eta_bat: f64,
    pub eta_ps: f64,
    pub objective: f64,
    pub feasible: bool,
    /// KKT multipliers when produced by an analysis; solvers leave this
    /// empty and the checker recovers them.
    pub multipliers: Option<[f64; 3]>,
    pub source: SolutionSource,
}

/// Build the reduced program from a deployed mission.
///
/// The threshold energy is taken from `swipt.e_threshold`; callers that
/// want the cycle-energy threshold resolve it first and pass it in the
/// config (see `SwiptConfig::threshold_policy`).
pub fn build_problem(
    mission: &MissionConfig,
    channel: &ChannelModel,
    deployment: &UserDeployment,
    swipt: &SwiptConfig,
) -> Result<OptimizationProblem> {
    if deployment.is_empty() {
        return Err(Error::InvalidProblem(
            "deployment is empty; the harvesting constraint needs at least one uplink user".into(),
        ));
    }
    channel.validate()?;
    swipt.validate()?;
    let per_user_gains: Vec<f64> = deployment
        .slant_ranges
        .iter()
        .map(|r| r.powf(-channel.path_loss_exponent))
        .collect();
    let gain_sum: f64 = per_user_gains.iter().sum();
    Ok(OptimizationProblem {
        g1: mission.p_t_users * gain_sum,
        g2: swipt.battery_initial - swipt.e_threshold,
        e_threshold: swipt.e_threshold,
        per_user_gains,
        noise_uplink: channel.noise_uplink,
        p_t_users: mission.p_t_users,
    })
}

/// The published closed-form candidate:
/// `eta_bat = G2 / e_threshold`, `eta_ps = G1 * e_threshold / G2`.
///
/// Values outside `[0, 1]` are reported as computed and flagged infeasible,
/// never clamped. The formulas are undefined at `G2 = 0` or
/// `e_threshold = 0`. See [`kkt`] for the audit showing these formulas do
/// not satisfy their own stationarity balance unless `G1 = 0`.
pub fn solve_closed_form(problem: &OptimizationProblem) -> Result<Solution> {
    if problem.e_threshold == 0.0 {
        return Err(Error::DivisionUndefined("e_threshold"));
    }
    if problem.g2 == 0.0 {
        return Err(Error::DivisionUndefined("g2"));
    }
    let eta_bat = problem.g2 / problem.e_threshold;
    let eta_ps = problem.g1 * problem.e_threshold / problem.g2;
    Ok(Solution {
        eta_bat,
        eta_ps,
        objective: problem.objective(eta_ps),
        feasible: problem.is_feasible(eta_bat, eta_ps),
        multipliers: None,
        source: SolutionSource::ClosedForm,
    })
}

/// Exhaustive scan of the unit-square lattice with `resolution` points per
/// axis (endpoints included).
///
/// Ties in the objective are broken toward the smallest split, then the
/// largest battery efficiency; the largest-efficiency convention is stable
/// across lattice resolutions because the feasible set of each split column
/// is an interval whose upper end does not chase the lattice offset.
///
/// Columns whose constraint is negative at both efficiency endpoints hold
/// no feasible point at all (the constraint is affine in the efficiency),
/// so the scan skips their interiors. Returns an all-NaN infeasible
/// solution when no lattice point is feasible.
pub fn solve_grid(problem: &OptimizationProblem, resolution: usize) -> Solution {
    assert!(
        resolution >= 2,
        "lattice needs at least two points per axis"
    );
    let steps = (resolution - 1) as f64;

    // The objective decreases strictly in the split, so the best feasible
    // column is the first feasible one; columns are independent.
    let best = (0..resolution)
        .into_par_iter()
        .filter_map(|ps_idx| {
            let eta_ps = ps_idx as f64 / steps;
            let slope = eta_ps * problem.g1 - problem.e_threshold;
            let at_zero = problem.g2;
            let at_one = slope + problem.g2;
            if at_zero < 0.0 && at_one < 0.0 {
                return None;
            }
            // Largest feasible efficiency in this column.
            for bat_idx in (0..resolution).rev() {
                let eta_bat = bat_idx as f64 / steps;
                if slope * eta_bat + problem.g2 >= 0.0 {
                    return Some((ps_idx, bat_idx));
                }
            }
            None
        })
        .min_by_key(|&(ps_idx, _)| ps_idx);

    match best {
        Some((ps_idx, bat_idx)) => {
            let eta_ps = ps_idx as f64 / steps;
            let eta_bat = bat_idx as f64 / steps;
            Solution {
                eta_bat,
                eta_ps,
                objective: problem.objective(eta_ps),
                feasible: true,
                multipliers: None,
                source: SolutionSource::Grid,
            }
        }
        None => Solution {
            eta_bat: f64::NAN,
            eta_ps: f64::NAN,
            objective: f64::NAN,
            feasible: false,
            multipliers: None,
            source: SolutionSource::Grid,
        },
    }
}

/// Piecewise closed form of the reduced program, derived from the lattice
/// oracle.
///
/// * `G2 >= 0`: the split 0 column is feasible, so the optimum is
///   `eta_ps = 0` with the largest efficiency the constraint allows there,
///   `min(1, G2 / e_threshold)` (or 1 when the threshold is zero).
/// * `G2 < 0`: the constraint needs `eta_bat = 1` and the smallest feasible
///   split is `(e_threshold - G2) / G1`; when that exceeds 1 (including
///   `G1 = 0`) the program is infeasible and the required split is reported
///   unclamped.
///
/// The efficiency coordinate is not pinned by the objective; the convention
/// above mirrors the grid tie-break exactly.
pub fn solve_analytic(problem: &OptimizationProblem) -> Solution {
    let (eta_bat, eta_ps, feasible) = if problem.g2 >= 0.0 {
        let eta_bat = if problem.e_threshold > 0.0 {
            (problem.g2 / problem.e_threshold).min(1.0)
        } else {
            1.0
        };
        (eta_bat, 0.0, true)
    } else if problem.g1 > 0.0 {
        let required = (problem.e_threshold - problem.g2) / problem.g1;
        (1.0, required, required <= 1.0)
    } else {
        (1.0, f64::INFINITY, false)
    };
    Solution {
        eta_bat,
        eta_ps,
        objective: problem.objective(eta_ps),
        feasible,
        multipliers: None,
        source: SolutionSource::Analytic,
    }
}

#[cfg(test)]
pub(crate) fn random_problem(rng: &mut impl rand::Rng) -> OptimizationProblem {
    let g1 = rng.gen_range(0.0..=5.0);
    let e_threshold = rng.gen_range(f64::MIN_POSITIVE..=2.0);
    let battery_initial = rng.gen_range(0.0..=3.0);
    OptimizationProblem::from_constants(g1, e_threshold, battery_initial, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelModel;
    use crate::deployment::Region;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dumb double-loop reference for the lattice oracle, same tie-break.
    fn solve_grid_naive(problem: &OptimizationProblem, resolution: usize) -> Solution {
        let steps = (resolution - 1) as f64;
        let mut best: Option<(usize, usize, f64)> = None;
        for ps_idx in 0..resolution {
            let eta_ps = ps_idx as f64 / steps;
            for bat_idx in 0..resolution {
                let eta_bat = bat_idx as f64 / steps;
                if problem.harvest_constraint(eta_bat, eta_ps) < 0.0 {
                    continue;
                }
                let objective = problem.objective(eta_ps);
                let better = match best {
                    None => true,
                    Some((b_ps, b_bat, b_obj)) => {
                        objective > b_obj
                            || (objective == b_obj
                                && (ps_idx < b_ps || (ps_idx == b_ps && bat_idx > b_bat)))
                    }
                };
                if better {
                    best = Some((ps_idx, bat_idx, objective));
                }
            }
        }
        match best {
            Some((ps_idx, bat_idx, objective)) => Solution {
                eta_bat: bat_idx as f64 / steps,
                eta_ps: ps_idx as f64 / steps,
                objective,
                feasible: true,
                multipliers: None,
                source: SolutionSource::Grid,
            },
            None => Solution {
                eta_bat: f64::NAN,
                eta_ps: f64::NAN,
                objective: f64::NAN,
                feasible: false,
                multipliers: None,
                source: SolutionSource::Grid,
            },
        }
    }

    #[test]
    fn build_problem_unit_constants() {
        let mission = MissionConfig {
            altitude_net1: 1.0,
            altitude_net2: 1.0,
            inter_network_distance: 0.0,
            data_threshold: 0.0,
            user_density: 0.0,
            region: Region::new(1.0).unwrap(),
            p_t_users: 1.0,
            p_t_uav: 1.0,
            seed: 0,
        };
        let deployment = UserDeployment {
            positions: vec![[0.0, 0.0]],
            slant_ranges: vec![1.0],
            seed: 0,
        };
        let channel = ChannelModel::default();
        let swipt = SwiptConfig::default();
        let p = build_problem(&mission, &channel, &deployment, &swipt).unwrap();
        assert_eq!(p.g1, 1.0);
        assert_eq!(p.g2, swipt.battery_initial - swipt.e_threshold);
        // One more user at the same range doubles g1.
        let two = UserDeployment {
            positions: vec![[0.0, 0.0], [0.0, 0.0]],
            slant_ranges: vec![1.0, 1.0],
            seed: 0,
        };
        let p2 = build_problem(&mission, &channel, &two, &swipt).unwrap();
        assert_eq!(p2.g1, 2.0);
    }

    #[test]
    fn build_problem_rejects_empty_deployment() {
        let mission = MissionConfig {
            altitude_net1: 800.0,
            altitude_net2: 800.0,
            inter_network_distance: 5000.0,
            data_threshold: 4e5,
            user_density: 0.0,
            region: Region::new(1000.0).unwrap(),
            p_t_users: 5.0,
            p_t_uav: 3.0,
            seed: 0,
        };
        let empty = UserDeployment {
            positions: vec![],
            slant_ranges: vec![],
            seed: 0,
        };
        assert!(matches!(
            build_problem(
                &mission,
                &ChannelModel::default(),
                &empty,
                &SwiptConfig::default()
            ),
            Err(Error::InvalidProblem(_))
        ));
    }

    #[test]
    fn objective_is_linear_and_vanishes_at_full_split() {
        let p = OptimizationProblem::from_constants(2.0, 1.0, 0.5, 1.0);
        assert_eq!(p.objective(1.0), 0.0);
        assert_eq!(p.objective(0.0), 2.0);
        let mid = p.objective(0.5);
        assert_eq!(mid, 0.5 * (p.objective(0.0) + p.objective(1.0)));
    }

    #[test]
    fn harvest_constraint_known_values() {
        let p = OptimizationProblem::from_constants(2.0, 1.0, 0.8, 1.0);
        // At zero efficiency the residual is g2.
        assert_eq!(p.harvest_constraint(0.0, 0.3), p.g2);
        // Linear in the efficiency at a fixed split.
        let at = |b: f64| p.harvest_constraint(b, 0.3);
        assert!((at(0.5) - 0.5 * (at(0.0) + at(1.0))).abs() < 1e-15);
        // Nonnegative g2 makes the origin feasible.
        let q = OptimizationProblem::from_constants(2.0, 1.0, 1.5, 1.0);
        assert!(q.harvest_constraint(0.0, 0.0) >= 0.0);
        assert!(q.is_feasible(0.0, 0.0));
    }

    #[test]
    fn closed_form_known_values() {
        // battery 60, threshold 40: eta_bat = 20 / 40.
        let p = OptimizationProblem::from_constants(0.25, 40.0, 60.0, 1.0);
        let s = solve_closed_form(&p).unwrap();
        assert_eq!(s.eta_bat, 0.5);
        assert_eq!(s.eta_ps, 0.5);
        // battery 100, threshold 40: eta_bat = 1.5, out of bounds.
        let p = OptimizationProblem::from_constants(0.25, 40.0, 100.0, 1.0);
        let s = solve_closed_form(&p).unwrap();
        assert_eq!(s.eta_bat, 1.5);
        assert!(!s.feasible);
    }

    #[test]
    fn closed_form_rejects_undefined_divisions() {
        let zero_g2 = OptimizationProblem::from_constants(1.0, 1.0, 1.0, 1.0);
        assert!(matches!(
            solve_closed_form(&zero_g2),
            Err(Error::DivisionUndefined("g2"))
        ));
        let zero_th = OptimizationProblem::from_constants(1.0, 0.0, 1.0, 1.0);
        assert!(matches!(
            solve_closed_form(&zero_th),
            Err(Error::DivisionUndefined("e_threshold"))
        ));
    }

    #[test]
    fn grid_puts_surplus_batteries_at_zero_split() {
        let p = OptimizationProblem::from_constants(2.0, 1.0, 1.5, 1.0);
        let s = solve_grid(&p, 1001);
        assert!(s.feasible);
        assert_eq!(s.eta_ps, 0.0);
    }

    #[test]
    fn grid_finds_the_constraint_boundary() {
        // threshold 1, battery 0.8, g1 = 2: the deficit forces full
        // efficiency and a split of (1 + 0.2) / 2.
        let p = OptimizationProblem::from_constants(2.0, 1.0, 0.8, 1.0);
        let s = solve_grid(&p, 1001);
        assert!(s.feasible);
        assert!((s.eta_ps - 0.6).abs() <= 1.0 / 1000.0 + 1e-12);
        assert_eq!(s.eta_bat, 1.0);
    }

    #[test]
    fn grid_optimum_dominates_random_feasible_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let p = random_problem(&mut rng);
            let s = solve_grid(&p, 501);
            if !s.feasible {
                continue;
            }
            for _ in 0..200 {
                let eta_bat = rng.gen_range(0.0..=1.0);
                let eta_ps = rng.gen_range(0.0..=1.0);
                if p.harvest_constraint(eta_bat, eta_ps) >= 0.0 {
                    // Allow one lattice step of objective slack.
                    let slack = p.objective(0.0) / 500.0 + 1e-12;
                    assert!(s.objective >= p.objective(eta_ps) - slack);
                }
            }
        }
    }

    #[test]
    fn grid_matches_naive_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for resolution in [101, 251] {
            for _ in 0..100 {
                let p = random_problem(&mut rng);
                let fast = solve_grid(&p, resolution);
                let naive = solve_grid_naive(&p, resolution);
                assert_eq!(fast.feasible, naive.feasible);
                if fast.feasible {
                    assert_eq!(fast.eta_ps, naive.eta_ps);
                    assert_eq!(fast.eta_bat, naive.eta_bat);
                }
            }
        }
    }

    #[test]
    fn grid_resolutions_agree_within_one_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let p = random_problem(&mut rng);
            let coarse = solve_grid(&p, 501);
            let fine = solve_grid(&p, 1001);
            assert_eq!(coarse.feasible, fine.feasible);
            if coarse.feasible {
                let step = 1.0 / 500.0;
                assert!((coarse.eta_ps - fine.eta_ps).abs() <= step + 1e-12);
                assert!((coarse.eta_bat - fine.eta_bat).abs() <= step + 1e-12);
            }
        }
    }

    #[test]
    fn analytic_matches_grid_on_random_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let resolution = 2001;
        let step = 1.0 / 2000.0;
        for _ in 0..300 {
            let p = random_problem(&mut rng);
            let grid = solve_grid(&p, resolution);
            let analytic = solve_analytic(&p);
            assert_eq!(grid.feasible, analytic.feasible, "problem {p:?}");
            if grid.feasible {
                assert!(
                    (grid.eta_ps - analytic.eta_ps).abs() <= step + 1e-12,
                    "split mismatch on {p:?}: grid {} vs analytic {}",
                    grid.eta_ps,
                    analytic.eta_ps
                );
                assert!(
                    (grid.eta_bat - analytic.eta_bat).abs() <= step + 1e-12,
                    "efficiency mismatch on {p:?}: grid {} vs analytic {}",
                    grid.eta_bat,
                    analytic.eta_bat
                );
            }
        }
    }

    #[test]
    fn analytic_branch_examples() {
        // Surplus battery: zero split.
        let p = OptimizationProblem::from_constants(2.0, 1.0, 1.5, 1.0);
        let s = solve_analytic(&p);
        assert!(s.feasible);
        assert_eq!(s.eta_ps, 0.0);
        assert_eq!(s.eta_bat, 0.5);
        // Deficit with attainable split.
        let p = OptimizationProblem::from_constants(2.0, 1.0, 0.8, 1.0);
        let s = solve_analytic(&p);
        assert!(s.feasible);
        assert!((s.eta_ps - 0.6).abs() < 1e-15);
        assert_eq!(s.eta_bat, 1.0);
        // Required split beyond one: infeasible, reported unclamped.
        let p = OptimizationProblem::from_constants(0.5, 1.0, 0.8, 1.0);
        let s = solve_analytic(&p);
        assert!(!s.feasible);
        assert!(s.eta_ps > 1.0);
        let grid = solve_grid(&p, 1001);
        assert!(!grid.feasible);
    }

    #[test]
    fn feasible_flags_agree_with_direct_constraint_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..200 {
            let p = random_problem(&mut rng);
            if p.g2 != 0.0 && p.e_threshold != 0.0 {
                let s = solve_closed_form(&p).unwrap();
                assert_eq!(s.feasible, p.is_feasible(s.eta_bat, s.eta_ps));
            }
            let s = solve_analytic(&p);
            if s.eta_ps.is_finite() {
                assert_eq!(s.feasible, p.is_feasible(s.eta_bat, s.eta_ps));
            }
            let s = solve_grid(&p, 301);
            if s.feasible {
                assert!(p.is_feasible(s.eta_bat, s.eta_ps));
            }
        }
    }
}
