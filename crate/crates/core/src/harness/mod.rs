//! Monte-Carlo experiments: configuration, execution and CSV/plot output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{Algorithm, ExperimentConfig, ExperimentKind, ScenarioId};
pub use output::{csv_string, emit_csv, emit_plot_script, plot_script, CSV_HEADER};
pub use run::{loaded_smi, run_experiment, AbortedTrial, LoadedSmi, ResultRow, RunReport};
