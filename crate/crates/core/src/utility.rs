//! Utility-change vectors and the resource parameter.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{ensure_same_space, ActionSpace};

/// A change in utility, one finite value per action.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityChange {
    space: Arc<ActionSpace>,
    values: Vec<f64>,
}

impl UtilityChange {
    pub fn new(space: &Arc<ActionSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(Error::SpaceMismatch {
                left: space.size(),
                right: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("utility change entry {v}")));
        }
        Ok(Self {
            space: Arc::clone(space),
            values,
        })
    }

    pub fn space(&self) -> &Arc<ActionSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entrywise scaling; used to slice a total change into per-step
    /// increments.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !factor.is_finite() {
            return Err(Error::NonFinite(format!("scale factor {factor}")));
        }
        Ok(Self {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(|v| v * factor).collect(),
        })
    }

    pub(crate) fn ensure_space(&self, other: &Arc<ActionSpace>) -> Result<()> {
        ensure_same_space(&self.space, other)
    }
}

/// The signed resource parameter beta. Positive values model an exploitable
/// environment, negative an adversarial one; zero disables adaptation and
/// routes every caller through its dedicated limit branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceParameter(f64);

impl ResourceParameter {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::NonFinite(format!("beta {beta}")));
        }
        Ok(Self(beta))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

impl std::fmt::Display for ResourceParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
