//! Lagged-policy scenarios.
//!
//! A utility change is applied over one or N timesteps. At every step the
//! agent still acts with the previous step's policy, earns the expected
//! utility of the increment under that lagged policy, and only then adopts
//! the Gibbs update. The gap between the achievable free-energy gain and the
//! utility actually earned is the dissipated utility; this module does that
//! accounting per step and in total.

use crate::equilibrium::gibbs_update;
use crate::error::{Error, Result};
use crate::math::compensated_sum;
use crate::parallel::try_indexed_map;
use crate::policy::Policy;
use crate::utility::{ResourceParameter, UtilityChange};

/// Shape of the interpolation from the old to the new utility function.
/// Only the linear ramp ships; the tag is the extension point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Linear,
}

/// A total utility change split over `n_steps` timesteps.
#[derive(Debug, Clone)]
pub struct UtilitySchedule {
    base_du: UtilityChange,
    n_steps: usize,
    kind: ScheduleKind,
}

impl UtilitySchedule {
    /// Linear ramp: every step applies the increment `du / n_steps`.
    pub fn linear(base_du: UtilityChange, n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::InvalidArgument(
                "a schedule needs at least one step".into(),
            ));
        }
        Ok(Self {
            base_du,
            n_steps,
            kind: ScheduleKind::Linear,
        })
    }

    pub fn base_du(&self) -> &UtilityChange {
        &self.base_du
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    /// Utility increment applied at step `t` (1-based).
    pub fn increment_at(&self, _t: usize) -> UtilityChange {
        match self.kind {
            ScheduleKind::Linear => self
                .base_du
                .scaled(1.0 / self.n_steps as f64)
                .expect("finite scale"),
        }
    }
}

/// One timestep of a lagged scenario. `policy_used` is the lagged policy the
/// agent acted with; `policy_after` is the Gibbs update it adopts afterwards.
/// The fields satisfy `net_utility + dissipated_utility = free_energy_gain`.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub t: usize,
    pub policy_used: Policy,
    pub policy_after: Policy,
    pub net_utility: f64,
    pub dissipated_utility: f64,
    pub free_energy_gain: f64,
}

/// Full record of a scenario run, with totals over all steps.
#[derive(Debug, Clone)]
pub struct LagTrace {
    pub beta: ResourceParameter,
    pub steps: Vec<StepRecord>,
    pub total_net: f64,
    pub total_dissipated: f64,
    pub total_free_energy: f64,
}

impl LagTrace {
    pub fn final_policy(&self) -> &Policy {
        &self.steps.last().expect("traces have at least one step").policy_after
    }

    fn from_steps(beta: ResourceParameter, steps: Vec<StepRecord>) -> Self {
        let nets: Vec<f64> = steps.iter().map(|s| s.net_utility).collect();
        let disses: Vec<f64> = steps.iter().map(|s| s.dissipated_utility).collect();
        let gains: Vec<f64> = steps.iter().map(|s| s.free_energy_gain).collect();
        Self {
            beta,
            total_net: compensated_sum(&nets),
            total_dissipated: compensated_sum(&disses),
            total_free_energy: compensated_sum(&gains),
            steps,
        }
    }
}

fn step_record(
    t: usize,
    policy: &Policy,
    increment: &UtilityChange,
    beta: ResourceParameter,
) -> Result<StepRecord> {
    let net_utility = policy.expected_utility(increment)?;
    let update = gibbs_update(policy, increment, beta)?;
    // (1/beta) KL(lagged ‖ updated); exactly zero at beta = 0, where both
    // definitions of the dissipation agree in the limit.
    let dissipated_utility = if beta.is_zero() {
        0.0
    } else {
        policy.kl_divergence(&update.posterior)? / beta.value()
    };
    Ok(StepRecord {
        t,
        policy_used: policy.clone(),
        policy_after: update.posterior,
        net_utility,
        dissipated_utility,
        free_energy_gain: update.free_energy_delta,
    })
}

/// Instantaneous change: the agent earns the prior mean of `du`, the optimal
/// gain is the free energy difference, and the shortfall
/// `(1/beta) KL(prior ‖ posterior)` is dissipated.
pub fn one_step_scenario(
    prior: &Policy,
    du: &UtilityChange,
    beta: ResourceParameter,
) -> Result<LagTrace> {
    let step = step_record(1, prior, du, beta)?;
    Ok(LagTrace::from_steps(beta, vec![step]))
}

/// Runs the lagged recursion over the schedule: at step `t` the agent acts
/// with `p_{t-1}`, earns the increment's expectation under it, then adopts
/// the Gibbs update for the increment. A one-step schedule reproduces
/// [`one_step_scenario`] field for field.
pub fn n_step_scenario(
    prior: &Policy,
    schedule: &UtilitySchedule,
    beta: ResourceParameter,
) -> Result<LagTrace> {
    schedule.base_du().ensure_space(prior.space())?;
    let mut policy = prior.clone();
    let mut steps = Vec::with_capacity(schedule.n_steps());
    for t in 1..=schedule.n_steps() {
        let increment = schedule.increment_at(t);
        let step = step_record(t, &policy, &increment, beta)?;
        policy = step.policy_after.clone();
        steps.push(step);
    }
    Ok(LagTrace::from_steps(beta, steps))
}

/// The policies `p_0 .. p_N` visited by the recursion, without the
/// per-step accounting.
pub fn policy_sequence(
    prior: &Policy,
    schedule: &UtilitySchedule,
    beta: ResourceParameter,
) -> Result<Vec<Policy>> {
    schedule.base_du().ensure_space(prior.space())?;
    let mut sequence = Vec::with_capacity(schedule.n_steps() + 1);
    sequence.push(prior.clone());
    for t in 1..=schedule.n_steps() {
        let increment = schedule.increment_at(t);
        let next = gibbs_update(sequence.last().expect("non-empty"), &increment, beta)?.posterior;
        sequence.push(next);
    }
    Ok(sequence)
}

/// Totals of an N-step run, one row per requested N.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipationRow {
    pub n_steps: usize,
    pub total_net: f64,
    pub total_dissipated: f64,
    pub total_free_energy: f64,
}

/// Runs the scenario for each `n` and tabulates the totals. The total free
/// energy is the same in every row; for beta > 0 the dissipation shrinks as
/// the change is spread over more steps.
pub fn dissipation_vs_n(
    prior: &Policy,
    du: &UtilityChange,
    beta: ResourceParameter,
    n_values: &[usize],
) -> Result<Vec<DissipationRow>> {
    if n_values.is_empty() {
        return Err(Error::EmptyInput("dissipation_vs_n needs at least one N"));
    }
    try_indexed_map(n_values.len(), |i| {
        let schedule = UtilitySchedule::linear(du.clone(), n_values[i])?;
        let trace = n_step_scenario(prior, &schedule, beta)?;
        Ok(DissipationRow {
            n_steps: n_values[i],
            total_net: trace.total_net,
            total_dissipated: trace.total_dissipated,
            total_free_energy: trace.total_free_energy,
        })
    })
}
