//! Finite, ordered action spaces.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An ordered, non-empty set of action labels. The ordering is fixed at
/// construction and shared by every vector indexed over the space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpace {
    labels: Vec<String>,
}

impl ActionSpace {
    /// Builds a space from unique labels. Fails on an empty list or on
    /// duplicate labels.
    pub fn new<I, S>(labels: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyInput("action space needs at least one action"));
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate action label: {label:?}"
                )));
            }
        }
        Ok(Arc::new(Self { labels }))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Fast pointer check first; falls back to label comparison so that two
/// independently built but identical spaces are compatible.
pub(crate) fn ensure_same_space(a: &Arc<ActionSpace>, b: &Arc<ActionSpace>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::SpaceMismatch {
            left: a.size(),
            right: b.size(),
        })
    }
}
