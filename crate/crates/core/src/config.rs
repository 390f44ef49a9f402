use serde::{Deserialize, Serialize};

use crate::exec::Parallelism;

/// Resource caps and execution strategy shared by the pipeline stages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Maximum number of elementary circuits enumerated per piece.
    pub cycle_cap: usize,
    /// Maximum number of maximal chains enumerated per model.
    pub chain_cap: usize,
    /// Maximum number of grid points tested by one convexity probe.
    pub probe_cap: usize,
    pub parallelism: Parallelism,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            cycle_cap: crate::markov::DEFAULT_CYCLE_CAP,
            chain_cap: 1_000_000,
            probe_cap: 200_000,
            parallelism: Parallelism::default(),
        }
    }
}

impl EngineConfig {
    pub fn sequential() -> Self {
        Self {
            parallelism: Parallelism::Sequential,
            ..Self::default()
        }
    }
}
