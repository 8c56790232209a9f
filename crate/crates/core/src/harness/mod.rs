//! Experiment harness: statistical test utilities, configuration,
//! orchestration, plot-data emission, and the acceptance checks.

pub mod stats;
