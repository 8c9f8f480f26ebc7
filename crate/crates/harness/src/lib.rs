//! Seeded experiment runner over `incpath-core`.
//!
//! Trial `t` of every Monte Carlo command draws from its own generator seeded
//! with `trial_seed(seed, t)`, and values are collected in trial order, so a
//! report depends only on its [`ExperimentConfig`] and the toolkit version.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{Command, ExperimentConfig};
pub use experiments::run;
pub use report::{summarize, Report, Summary};

use thiserror::Error;

pub const TOOLKIT: &str = "incpath";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable giving the default worker count.
pub const THREADS_ENV: &str = "INCPATH_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{command}: {source}")]
    Core { command: &'static str, source: incpath_core::Error },
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl HarnessError {
    /// 2 for invalid arguments, 3 for capacity errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core { source: incpath_core::Error::Capacity(_), .. } => 3,
            Self::Core { .. } | Self::Usage(_) => 2,
            Self::Io { .. } => 1,
        }
    }
}

/// Runs `config` on a pool of `threads` workers (`None`: rayon's default).
pub fn run_with_threads(config: ExperimentConfig, threads: Option<usize>) -> Result<Report, HarnessError> {
    match threads {
        None => run(config),
        Some(0) => Err(HarnessError::Usage("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| HarnessError::Usage(format!("cannot start {t} workers: {e}")))?
            .install(|| run(config)),
    }
}

/// Worker count from `--threads`, falling back to the environment variable.
pub fn thread_count(flag: Option<usize>, env_value: Option<&str>) -> Result<Option<usize>, HarnessError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match env_value.map(str::trim).filter(|s| !s.is_empty()) {
        None => Ok(None),
        Some(s) => s
            .parse()
            .map(Some)
            .map_err(|_| HarnessError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{s}'"))),
    }
}
