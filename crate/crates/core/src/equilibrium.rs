//! Single-shot bounded-rational optimum: the Gibbs posterior and the free
//! energy difference for one utility change at one resource level.

use crate::error::{Error, Result};
use crate::math::log_sum_exp_weighted;
use crate::parallel::indexed_map;
use crate::policy::Policy;
use crate::rng::{sample_simplex, substream};
use crate::utility::{ResourceParameter, UtilityChange};

/// Outcome of a Gibbs update.
///
/// For `beta != 0` the fields satisfy `free_energy_delta = log_partition / beta`
/// exactly; at `beta = 0` the posterior is the prior and `free_energy_delta`
/// is the prior mean of the utility change (the limit value), with
/// `log_partition = 0`.
#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub posterior: Policy,
    pub free_energy_delta: f64,
    pub log_partition: f64,
}

/// Computes the optimal posterior `p1(x) ∝ prior(x) · exp(beta · du(x))` in
/// log space, together with the achieved free energy difference
/// `log_partition / beta`. The same formula serves both signs of beta; zero
/// takes the exact limit branch instead of a small-beta approximation.
pub fn gibbs_update(
    prior: &Policy,
    du: &UtilityChange,
    beta: ResourceParameter,
) -> Result<EquilibriumResult> {
    du.ensure_space(prior.space())?;

    if beta.is_zero() {
        return Ok(EquilibriumResult {
            posterior: prior.clone(),
            free_energy_delta: prior.expected_utility(du)?,
            log_partition: 0.0,
        });
    }

    let log_prior = prior.log_probs();
    let exponents: Vec<f64> = du.values().iter().map(|u| beta.value() * u).collect();
    let log_partition = log_sum_exp_weighted(&log_prior, &exponents)?;
    let log_weights: Vec<f64> = log_prior
        .iter()
        .zip(&exponents)
        .map(|(lp, e)| lp + e)
        .collect();
    let posterior = Policy::from_log_weights(prior.space(), &log_weights);

    Ok(EquilibriumResult {
        posterior,
        free_energy_delta: log_partition / beta.value(),
        log_partition,
    })
}

/// The trade-off functional `E_p[du] - (1/beta) · KL(p ‖ prior)` for an
/// arbitrary policy `p`. May be `-inf` (beta > 0) or `+inf` (beta < 0) when
/// the divergence sentinel fires. Undefined at `beta = 0`; callers wanting
/// the no-resource limit should use [`gibbs_update`].
pub fn free_energy_functional(
    p: &Policy,
    prior: &Policy,
    du: &UtilityChange,
    beta: ResourceParameter,
) -> Result<f64> {
    if beta.is_zero() {
        return Err(Error::ZeroBeta("free_energy_functional"));
    }
    let expected = p.expected_utility(du)?;
    let divergence = p.kl_divergence(prior)?;
    Ok(expected - divergence / beta.value())
}

/// Result of a randomized optimality check.
#[derive(Debug, Clone)]
pub struct OptimalityReport {
    pub passed: bool,
    pub trials: u32,
    /// Functional value at the Gibbs posterior.
    pub optimum: f64,
    /// Largest signed excess of a sampled policy over the optimum (beta > 0)
    /// or below it (beta < 0). Negative means no sample came close.
    pub worst_violation: f64,
    pub slack: f64,
}

const OPTIMALITY_SLACK: f64 = 1e-9;

/// Samples `trials` policies uniformly from the simplex and checks that none
/// beats the Gibbs posterior: the functional stays below the optimum for
/// beta > 0 and above it for beta < 0, within `1e-9` absolute slack.
pub fn verify_variational_optimum(
    prior: &Policy,
    du: &UtilityChange,
    beta: ResourceParameter,
    trials: u32,
    seed: u64,
) -> Result<OptimalityReport> {
    if beta.is_zero() {
        return Err(Error::ZeroBeta("verify_variational_optimum"));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }

    let optimum = gibbs_update(prior, du, beta)?.free_energy_delta;
    let sign = beta.value().signum();
    let space = prior.space();

    let violations = indexed_map(trials as usize, |i| {
        let mut rng = substream(seed, i as u64);
        let candidate = Policy::new(space, sample_simplex(&mut rng, space.size()))
            .expect("simplex sample is a valid distribution");
        let value = free_energy_functional(&candidate, prior, du, beta)
            .expect("spaces already checked");
        sign * (value - optimum)
    });
    let worst_violation = violations
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(OptimalityReport {
        passed: worst_violation <= OPTIMALITY_SLACK,
        trials,
        optimum,
        worst_violation,
        slack: OPTIMALITY_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::ActionSpace;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::sync::Arc;

    // Two-action running example: prior (0.5, 0.5), du (-2, 5). Reference
    // values from scripts/reference_values.py.
    fn example() -> (Arc<ActionSpace>, Policy, UtilityChange) {
        let space = ActionSpace::new(["a", "b"]).unwrap();
        let prior = Policy::uniform(&space);
        let du = UtilityChange::new(&space, vec![-2.0, 5.0]).unwrap();
        (space, prior, du)
    }

    fn beta(v: f64) -> ResourceParameter {
        ResourceParameter::new(v).unwrap()
    }

    #[test]
    fn gibbs_reference_instance() {
        let (_, prior, du) = example();
        let res = gibbs_update(&prior, &du, beta(1.0)).unwrap();
        assert_relative_eq!(res.free_energy_delta, 4.307764285893829, max_relative = 1e-12);
        assert_relative_eq!(res.log_partition, 4.307764285893829, max_relative = 1e-12);
        assert_relative_eq!(res.posterior.probs()[0], 9.110511944006454e-4, max_relative = 1e-12);
        assert_relative_eq!(res.posterior.probs()[1], 0.9990889488055994, max_relative = 1e-12);
    }

    #[test]
    fn zero_beta_returns_prior_and_prior_mean() {
        let (_, prior, du) = example();
        let res = gibbs_update(&prior, &du, beta(0.0)).unwrap();
        assert_eq!(res.posterior.probs(), prior.probs());
        assert_eq!(res.free_energy_delta, 1.5);
        assert_eq!(res.log_partition, 0.0);
    }

    #[test]
    fn constant_utility_change_is_inert() {
        let (space, prior, _) = example();
        let du = UtilityChange::new(&space, vec![3.75, 3.75]).unwrap();
        for b in [-2.0, 0.0, 1.0, 5.0] {
            let res = gibbs_update(&prior, &du, beta(b)).unwrap();
            assert_abs_diff_eq!(res.posterior.probs()[0], 0.5, epsilon = 1e-12);
            assert_relative_eq!(res.free_energy_delta, 3.75, max_relative = 1e-12);
        }
    }

    #[test]
    fn functional_at_posterior_matches_free_energy_delta() {
        let (_, prior, du) = example();
        for b in [-2.0, -0.5, 0.5, 1.0, 5.0] {
            let res = gibbs_update(&prior, &du, beta(b)).unwrap();
            let f = free_energy_functional(&res.posterior, &prior, &du, beta(b)).unwrap();
            assert_relative_eq!(f, res.free_energy_delta, max_relative = 1e-9);
        }
    }

    #[test]
    fn functional_at_prior_is_prior_mean() {
        let (_, prior, du) = example();
        let f = free_energy_functional(&prior, &prior, &du, beta(2.0)).unwrap();
        assert_relative_eq!(f, 1.5, max_relative = 1e-12);
    }

    #[test]
    fn functional_reference_value_at_suboptimal_policy() {
        let (space, prior, du) = example();
        let p = Policy::new(&space, vec![0.9, 0.1]).unwrap();
        // -1.3 - KL((0.9,0.1) ‖ (0.5,0.5)) = -1.668064207168497
        let f = free_energy_functional(&p, &prior, &du, beta(1.0)).unwrap();
        assert_relative_eq!(f, -1.668064207168497, max_relative = 1e-12);
    }

    #[test]
    fn functional_rejects_zero_beta() {
        let (_, prior, du) = example();
        assert!(matches!(
            free_energy_functional(&prior, &prior, &du, beta(0.0)),
            Err(Error::ZeroBeta(_))
        ));
    }

    #[test]
    fn sampled_policies_never_beat_the_optimum() {
        let (_, prior, du) = example();
        let report = verify_variational_optimum(&prior, &du, beta(1.0), 1000, 11).unwrap();
        assert!(report.passed, "worst violation {}", report.worst_violation);

        let reversed = verify_variational_optimum(&prior, &du, beta(-1.0), 1000, 11).unwrap();
        assert!(reversed.passed, "worst violation {}", reversed.worst_violation);
    }

    #[test]
    fn single_action_space_passes_trivially() {
        let space = ActionSpace::new(["only"]).unwrap();
        let prior = Policy::uniform(&space);
        let du = UtilityChange::new(&space, vec![2.5]).unwrap();
        let report = verify_variational_optimum(&prior, &du, beta(1.0), 10, 0).unwrap();
        assert!(report.passed);
        assert_abs_diff_eq!(report.worst_violation, 0.0, epsilon = 1e-12);
    }
}
