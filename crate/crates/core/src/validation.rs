use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Malformed document structure or values.
    Schema,
    /// An id that does not resolve.
    Reference,
    /// A model invariant does not hold.
    Invariant,
    /// A check could not finish within its configured cap.
    Resource,
}

/// One failed invariant, located by a JSON-pointer path into the model
/// document (relative to the validated value).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub path: String,
    pub invariant: String,
    pub message: String,
}

impl Violation {
    pub fn new(kind: ViolationKind, path: impl Into<String>, invariant: &str, message: impl Into<String>) -> Self {
        Self {
            kind,
            path: path.into(),
            invariant: invariant.to_string(),
            message: message.into(),
        }
    }

    pub fn invariant(path: impl Into<String>, invariant: &str, message: impl Into<String>) -> Self {
        Self::new(ViolationKind::Invariant, path, invariant, message)
    }

    pub fn reference(path: impl Into<String>, invariant: &str, message: impl Into<String>) -> Self {
        Self::new(ViolationKind::Reference, path, invariant, message)
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.path = format!("{prefix}{}", self.path);
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() { "/" } else { &self.path };
        write!(f, "{path}: {}: {}", self.invariant, self.message)
    }
}

/// Escapes one JSON-pointer reference token.
pub(crate) fn pointer_token(s: &str) -> String {
    s.replace('~', "~0").replace('/', "~1")
}
