//! Experiment harness: configuration files, preset runners and CSV output.

pub mod config;
pub mod output;
pub mod presets;
pub mod scenarios;

pub use config::{load_config, parse_config, ExperimentSpec, NamedScenario, Preset};
pub use output::{ExperimentResult, PatternTable, Row};
pub use presets::{oracle_report, run};
pub use scenarios::Case;
