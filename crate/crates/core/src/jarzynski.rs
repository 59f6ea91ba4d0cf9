//! Path-ensemble estimators of `exp(beta * dF)`.
//!
//! Action paths `x_1 .. x_N` are drawn stepwise from the lagged policies, so
//! a path has probability `prod_t p_{t-1}(x_t)` and carries the utility
//! `(1/N) sum_t du(x_t)`. Averaging `exp(beta * path utility)` under that
//! measure recovers `exp(beta * dF)` of the total change — verified here both
//! by exhaustive enumeration and by seeded Monte-Carlo sampling.

use rand::Rng;

use crate::error::{Error, Result};
use crate::lagged::{policy_sequence, UtilitySchedule};
use crate::math::{log_sum_exp, mean_and_standard_error, MAX_EXP};
use crate::parallel::indexed_map;
use crate::policy::Policy;
use crate::rng::substream;
use crate::utility::ResourceParameter;

/// Hard cap on exhaustive enumeration: `|actions|^N` paths.
pub const ENUMERATION_BUDGET: u64 = 1_000_000;

/// One sampled or enumerated action path.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionPath {
    /// Action index chosen at each step, length N.
    pub actions: Vec<usize>,
    /// `sum_t` of the step increments along the path; `(1/N) sum_t du(x_t)`
    /// for a linear schedule.
    pub path_utility: f64,
    /// `sum_t ln p_{t-1}(x_t)` under the lagged policies.
    pub log_path_probability: f64,
}

/// An estimator of `exp(beta * dF)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JarzynskiEstimate {
    pub estimate: f64,
    pub log_estimate: f64,
    /// Zero when `exact` is set.
    pub standard_error: f64,
    /// Sample count, or the number of enumerated paths for exact results.
    pub n_samples: u64,
    pub exact: bool,
}

/// Sample mean of the path utility itself, for exhibiting the gap to the
/// free energy difference.
#[derive(Debug, Clone, PartialEq)]
pub struct PathUtilityStats {
    pub mean: f64,
    pub standard_error: f64,
    pub n_samples: u64,
}

/// Per-step tables of the lagged path measure: log-policies, sampling CDFs,
/// and the utility increment values.
struct PathMeasure {
    log_policies: Vec<Vec<f64>>,
    cumulatives: Vec<Vec<f64>>,
    step_utilities: Vec<Vec<f64>>,
    size: usize,
    n_steps: usize,
}

impl PathMeasure {
    fn build(
        prior: &Policy,
        schedule: &UtilitySchedule,
        beta: ResourceParameter,
    ) -> Result<Self> {
        let policies = policy_sequence(prior, schedule, beta)?;
        let size = prior.space().size();
        let n_steps = schedule.n_steps();
        // step t draws from p_{t-1}: the last policy of the sequence is
        // never sampled from.
        let lagged = &policies[..n_steps];
        Ok(Self {
            log_policies: lagged.iter().map(Policy::log_probs).collect(),
            cumulatives: lagged.iter().map(Policy::cumulative).collect(),
            step_utilities: (1..=n_steps)
                .map(|t| schedule.increment_at(t).values().to_vec())
                .collect(),
            size,
            n_steps,
        })
    }

    fn path_count(&self) -> Result<u64> {
        let mut count: u128 = 1;
        for _ in 0..self.n_steps {
            count = count.saturating_mul(self.size as u128);
            if count > ENUMERATION_BUDGET as u128 {
                return Err(Error::EnumerationBudget {
                    paths: count,
                    budget: ENUMERATION_BUDGET,
                });
            }
        }
        Ok(count as u64)
    }

    /// Decodes a path index into per-step action indices (mixed radix,
    /// step 1 in the lowest digit).
    fn decode(&self, mut index: u64, actions: &mut Vec<usize>) {
        actions.clear();
        for _ in 0..self.n_steps {
            actions.push((index % self.size as u64) as usize);
            index /= self.size as u64;
        }
    }

    fn utility_and_log_prob(&self, actions: &[usize]) -> (f64, f64) {
        let mut utility = 0.0;
        let mut log_prob = 0.0;
        for (t, &x) in actions.iter().enumerate() {
            utility += self.step_utilities[t][x];
            log_prob += self.log_policies[t][x];
        }
        (utility, log_prob)
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> ActionPath {
        let mut actions = Vec::with_capacity(self.n_steps);
        for cumulative in &self.cumulatives {
            let u: f64 = rng.gen();
            let idx = cumulative.partition_point(|&c| c <= u);
            actions.push(idx.min(self.size - 1));
        }
        let (path_utility, log_path_probability) = self.utility_and_log_prob(&actions);
        ActionPath {
            actions,
            path_utility,
            log_path_probability,
        }
    }
}

/// Exhaustively averages `exp(beta * path utility)` over every path under
/// the lagged measure, in log space. The result equals `exp(beta * dF)` of
/// the total change; that identity is the module's ground truth and is
/// asserted by the test suite rather than assumed here.
pub fn exact_path_expectation(
    prior: &Policy,
    schedule: &UtilitySchedule,
    beta: ResourceParameter,
) -> Result<JarzynskiEstimate> {
    let measure = PathMeasure::build(prior, schedule, beta)?;
    let count = measure.path_count()?;

    if beta.is_zero() {
        // every path contributes exp(0) = 1 and the measure is normalized
        return Ok(JarzynskiEstimate {
            estimate: 1.0,
            log_estimate: 0.0,
            standard_error: 0.0,
            n_samples: count,
            exact: true,
        });
    }

    let log_terms = indexed_map(count as usize, |i| {
        let mut actions = Vec::with_capacity(measure.n_steps);
        measure.decode(i as u64, &mut actions);
        let (utility, log_prob) = measure.utility_and_log_prob(&actions);
        log_prob + beta.value() * utility
    });
    let log_estimate = log_sum_exp(&log_terms);
    if log_estimate > MAX_EXP {
        return Err(Error::OutOfRange(format!(
            "path expectation exponent {log_estimate} exceeds {MAX_EXP}"
        )));
    }

    Ok(JarzynskiEstimate {
        estimate: log_estimate.exp(),
        log_estimate,
        standard_error: 0.0,
        n_samples: count,
        exact: true,
    })
}

/// Materializes every path with its utility and log-probability. Subject to
/// the same enumeration budget as [`exact_path_expectation`].
pub fn enumerate_paths(
    prior: &Policy,
    schedule: &UtilitySchedule,
    beta: ResourceParameter,
) -> Result<Vec<ActionPath>> {
    let measure = PathMeasure::build(prior, schedule, beta)?;
    let count = measure.path_count()?;
    Ok(indexed_map(count as usize, |i| {
        let mut actions = Vec::with_capacity(measure.n_steps);
        measure.decode(i as u64, &mut actions);
        let (path_utility, log_path_probability) = measure.utility_and_log_prob(&actions);
        ActionPath {
            actions,
            path_utility,
            log_path_probability,
        }
    }))
}

/// Draws `n_samples` paths stepwise from the lagged policies. Sample `i`
/// uses the substream `(seed, i)`, so output is reproducible for a fixed
/// seed no matter how many worker threads run.
pub fn sample_paths(
    prior: &Policy,
    schedule: &UtilitySchedule,
    beta: ResourceParameter,
    n_samples: u64,
    seed: u64,
) -> Result<Vec<ActionPath>> {
    let measure = PathMeasure::build(prior, schedule, beta)?;
    Ok(indexed_map(n_samples as usize, |i| {
        measure.draw(&mut substream(seed, i as u64))
    }))
}

fn sampled_path_utilities(
    prior: &Policy,
    schedule: &UtilitySchedule,
    beta: ResourceParameter,
    n_samples: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    let measure = PathMeasure::build(prior, schedule, beta)?;
    Ok(indexed_map(n_samples as usize, |i| {
        measure.draw(&mut substream(seed, i as u64)).path_utility
    }))
}

/// Monte-Carlo estimator of `exp(beta * dF)`: the sample mean of
/// `exp(beta * path utility)` with its unbiased standard error. Exponents
/// beyond the representable range surface as a range error instead of an
/// infinite estimate. The known bias of exponential averages at finite
/// sample sizes is reported through the standard error, not corrected.
pub fn monte_carlo_estimate(
    prior: &Policy,
    schedule: &UtilitySchedule,
    beta: ResourceParameter,
    n_samples: u64,
    seed: u64,
) -> Result<JarzynskiEstimate> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "monte_carlo_estimate needs at least 2 samples, got {n_samples}"
        )));
    }
    let utilities = sampled_path_utilities(prior, schedule, beta, n_samples, seed)?;
    let mut weights = Vec::with_capacity(utilities.len());
    for w in &utilities {
        let arg = beta.value() * w;
        if arg > MAX_EXP {
            return Err(Error::OutOfRange(format!(
                "sample weight exponent {arg} exceeds {MAX_EXP}"
            )));
        }
        weights.push(arg.exp());
    }
    let (estimate, standard_error) = mean_and_standard_error(&weights);
    if estimate <= 0.0 {
        return Err(Error::OutOfRange(
            "all sample weights underflowed to zero".into(),
        ));
    }
    Ok(JarzynskiEstimate {
        estimate,
        log_estimate: estimate.ln(),
        standard_error,
        n_samples,
        exact: false,
    })
}

/// Sample mean and standard error of the path utility under the same path
/// measure (and, for equal seeds, the same draws) as
/// [`monte_carlo_estimate`].
pub fn mean_path_utility(
    prior: &Policy,
    schedule: &UtilitySchedule,
    beta: ResourceParameter,
    n_samples: u64,
    seed: u64,
) -> Result<PathUtilityStats> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "mean_path_utility needs at least 2 samples, got {n_samples}"
        )));
    }
    let utilities = sampled_path_utilities(prior, schedule, beta, n_samples, seed)?;
    let (mean, standard_error) = mean_and_standard_error(&utilities);
    Ok(PathUtilityStats {
        mean,
        standard_error,
        n_samples,
    })
}
