//! Driver for finite causal fermion systems: system files, generators,
//! report bundles and the subcommands of the `cfs` binary.

pub mod commands;
pub mod config;
pub mod converge;
pub mod error;
pub mod file;
pub mod report;
pub mod validate;

pub use error::{CliError, CliResult};
pub use report::ReportBundle;

/// A worker pool with `threads` threads (all cores when `None`).
pub fn thread_pool(threads: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        b = b.num_threads(t);
    }
    b.build().map_err(|e| CliError::Usage(e.to_string()))
}
