//! Experiment runner: JSON configuration, batch dispatch to the analysis
//! modules, atomic CSV/JSON output, certified mixing-time search and
//! scaling fits.

mod config;
mod fit;
mod output;
mod run;
mod search;

pub use config::{ExperimentConfig, ExperimentKind, OutputFormat, SearchSpec};
pub use fit::{scaling_fit, ScalingFit};
pub use output::{render_csv, write_atomic, ResultRow};
pub use run::{render, run, run_to_output, worker_threads, RunReport, THREADS_VAR};
pub use search::{tmix_search, CertificateParams, TmixSearch};
