//! Experiment configuration, reports and the verification suites.

pub mod checks;
pub mod config;
pub mod oracle;
pub mod report;

pub use checks::{run_suite, CheckResult, Suite, Verdict};
pub use config::{ExperimentConfig, Profile};
pub use report::{run_experiment, Report, ReportRow, Summary};

use crate::error::{Error, Result};

/// Runs `f` on a dedicated rayon pool with `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}
