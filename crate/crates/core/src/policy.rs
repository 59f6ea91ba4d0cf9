//! Finite probability distributions over an action space.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{ensure_same_space, ActionSpace};
use crate::utility::UtilityChange;

/// How far from unit mass an input vector may be before construction
/// rejects it. Accepted vectors are renormalized, so stored probabilities
/// always sum to one within 1e-12.
const NORMALIZATION_SLACK: f64 = 1e-9;

/// A probability distribution over a shared [`ActionSpace`]. Immutable after
/// construction; probabilities are kept in linear space and are non-negative.
/// Entries may be exactly zero only when the caller supplied them as such —
/// the Gibbs machinery never introduces new zeros from a positive prior.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    space: Arc<ActionSpace>,
    probs: Vec<f64>,
}

impl Policy {
    /// Validates and renormalizes `probs`: entries must be finite and
    /// non-negative, and their sum must already be within 1e-9 of one.
    pub fn new(space: &Arc<ActionSpace>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != space.size() {
            return Err(Error::SpaceMismatch {
                left: space.size(),
                right: probs.len(),
            });
        }
        for p in &probs {
            if !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("non-finite entry {p}")));
            }
            if *p < 0.0 {
                return Err(Error::InvalidDistribution(format!("negative entry {p}")));
            }
        }
        let mass: f64 = probs.iter().sum();
        if (mass - 1.0).abs() > NORMALIZATION_SLACK {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {mass}, expected 1 within {NORMALIZATION_SLACK}"
            )));
        }
        let probs = probs.into_iter().map(|p| p / mass).collect();
        Ok(Self {
            space: Arc::clone(space),
            probs,
        })
    }

    pub fn uniform(space: &Arc<ActionSpace>) -> Self {
        let p = 1.0 / space.size() as f64;
        Self {
            space: Arc::clone(space),
            probs: vec![p; space.size()],
        }
    }

    /// Normalizes `exp(log_weights)` in log space. Used by the Gibbs update;
    /// weights of `-inf` map to probability zero.
    pub(crate) fn from_log_weights(space: &Arc<ActionSpace>, log_weights: &[f64]) -> Self {
        debug_assert_eq!(space.size(), log_weights.len());
        let log_norm = crate::math::log_sum_exp(log_weights);
        let probs: Vec<f64> = log_weights.iter().map(|w| (w - log_norm).exp()).collect();
        Self {
            space: Arc::clone(space),
            probs,
        }
    }

    pub fn space(&self) -> &Arc<ActionSpace> {
        &self.space
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub(crate) fn log_probs(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.ln()).collect()
    }

    /// Running sums of the probabilities, for inverse-CDF sampling.
    pub(crate) fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }

    /// `sum_x p(x) * du(x)` — the plain linear functional.
    pub fn expected_utility(&self, du: &UtilityChange) -> Result<f64> {
        du.ensure_space(&self.space)?;
        Ok(self
            .probs
            .iter()
            .zip(du.values())
            .map(|(p, u)| p * u)
            .sum())
    }

    /// `sum_{x: p(x)>0} p(x) ln(p(x)/q(x))`, natural logarithm. Terms with
    /// `p(x) = 0` contribute nothing; any `p(x) > 0` over `q(x) = 0` makes the
    /// divergence `+inf`, which is returned as a value rather than an error so
    /// downstream accounting can propagate it.
    pub fn kl_divergence(&self, other: &Policy) -> Result<f64> {
        ensure_same_space(&self.space, &other.space)?;
        let mut total = 0.0;
        for (&p, &q) in self.probs.iter().zip(&other.probs) {
            if p == 0.0 {
                continue;
            }
            if q == 0.0 {
                return Ok(f64::INFINITY);
            }
            total += p * (p / q).ln();
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn binary() -> Arc<ActionSpace> {
        ActionSpace::new(["a", "b"]).unwrap()
    }

    #[test]
    fn construction_renormalizes_within_tolerance() {
        let space = binary();
        let p = Policy::new(&space, vec![0.5 + 4e-10, 0.5]).unwrap();
        let mass: f64 = p.probs().iter().sum();
        assert!((mass - 1.0).abs() <= 1e-12);
        assert!(Policy::new(&space, vec![0.5, 0.6]).is_err());
        assert!(Policy::new(&space, vec![-0.1, 1.1]).is_err());
    }

    #[test]
    fn expected_utility_reference_values() {
        let space = binary();
        let p = Policy::uniform(&space);
        let du = UtilityChange::new(&space, vec![-2.0, 5.0]).unwrap();
        assert_relative_eq!(p.expected_utility(&du).unwrap(), 1.5, max_relative = 1e-12);

        let single = ActionSpace::new(["only"]).unwrap();
        let p1 = Policy::uniform(&single);
        let du1 = UtilityChange::new(&single, vec![-7.25]).unwrap();
        assert_eq!(p1.expected_utility(&du1).unwrap(), -7.25);

        let three = ActionSpace::new(["a", "b", "c"]).unwrap();
        let p3 = Policy::new(&three, vec![0.2, 0.3, 0.5]).unwrap();
        let du3 = UtilityChange::new(&three, vec![1.0, 0.0, -1.0]).unwrap();
        // direct high-precision dot product: -0.3
        assert_relative_eq!(p3.expected_utility(&du3).unwrap(), -0.3, epsilon = 1e-12);
    }

    #[test]
    fn expected_utility_rejects_mismatched_spaces() {
        let p = Policy::uniform(&binary());
        let other = ActionSpace::new(["x", "y", "z"]).unwrap();
        let du = UtilityChange::new(&other, vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            p.expected_utility(&du),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn kl_reference_values() {
        let space = binary();
        let p = Policy::uniform(&space);
        assert_eq!(p.kl_divergence(&p).unwrap(), 0.0);

        // q is the rounded optimum of the two-action running example;
        // reference value from scripts/reference_values.py.
        let q = Policy::new(&space, vec![0.000911, 0.999089]).unwrap();
        assert_relative_eq!(
            p.kl_divergence(&q).unwrap(),
            2.807792357398558,
            max_relative = 1e-12
        );

        let point_a = Policy::new(&space, vec![1.0, 0.0]).unwrap();
        let point_b = Policy::new(&space, vec![0.0, 1.0]).unwrap();
        assert_eq!(point_a.kl_divergence(&point_b).unwrap(), f64::INFINITY);
        // 0 * ln(0/q) contributes nothing even against a zero entry
        assert_eq!(point_a.kl_divergence(&point_a).unwrap(), 0.0);
    }
}
