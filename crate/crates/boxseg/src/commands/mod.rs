//! CLI subcommand implementations.
//!
//! Every command is a thin composition of library operations plus file
//! iteration. Exit-code contract: 0 success, 1 partial failure (some images
//! failed or were missing), 2 input or parse error. Input errors surface as
//! `Err`; partial failures as `Ok(1)`.

mod eval;
mod fit_boundary;
mod gen_pseudo;
mod segment;
mod stats;

pub use eval::{cmd_eval, EvalArgs};
pub use fit_boundary::{cmd_fit_boundary, FitBoundaryArgs};
pub use gen_pseudo::{cmd_gen_pseudo, GenPseudoArgs};
pub use segment::{cmd_segment, SegmentArgs};
pub use stats::cmd_stats;

use std::path::Path;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Prints the gradient audit and maps its verdict to an exit code.
pub fn cmd_gradcheck(seed: u64, size: u32) -> anyhow::Result<i32> {
    let report = crate::gradcheck::run_gradcheck(seed, size)?;
    println!("{}", report.render());
    Ok(if report.passed() { EXIT_OK } else { EXIT_PARTIAL })
}

/// Runs `f` inside a rayon pool of the requested width (default: available
/// parallelism). Per-image work is deterministic, so the pool width never
/// changes any output bytes.
pub(crate) fn with_pool<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> anyhow::Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    Ok(pool.install(f))
}

/// File stem of an image file name, used to derive mask and tensor names.
pub(crate) fn stem_of(file_name: &str) -> String {
    Path::new(file_name)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| file_name.to_string())
}
