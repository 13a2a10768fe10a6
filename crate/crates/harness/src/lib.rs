//! Experiment registry, batch execution and artifact output for the kv-core
//! verification suite.

pub mod config;
pub mod experiments;
pub mod output;
pub mod plot;
pub mod report;
pub mod sweep;

pub use config::{parse_config, ConfigError, ExperimentId, ExperimentSpec, ModelChoice, Params};
pub use experiments::{execute, Outcome};
pub use output::run_experiment;
pub use report::{Check, ExperimentReport};
pub use sweep::{sweep, SweepReport};

/// Built-in specs exercising the exact-solution oracles with their defaults.
pub fn oracle_specs() -> Vec<ExperimentSpec> {
    [ExperimentId::Dispersion, ExperimentId::OscillationOracle, ExperimentId::WeakLimits]
        .into_iter()
        .map(|id| ExperimentSpec::with_defaults(id.name(), id))
        .collect()
}
