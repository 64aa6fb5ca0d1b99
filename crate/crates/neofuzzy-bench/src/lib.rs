//! Shared fixtures for the criterion benches.

use neofuzzy::harness::{PreparedData, Preset};
use neofuzzy::membership::make_uniform_centers;
use neofuzzy::synapse::ModelConfig;

/// The smallest preset's scaled dataset, ready for learning loops.
pub fn narendra4_prepared() -> PreparedData {
    Preset::Narendra4
        .config()
        .prepare()
        .expect("preset prepares")
}

/// A shared-grid model config with uniform triangular memberships.
pub fn model_config(n: usize, h: usize, p: usize) -> ModelConfig {
    ModelConfig::shared(n, p, make_uniform_centers(h).expect("valid grid")).expect("valid config")
}
