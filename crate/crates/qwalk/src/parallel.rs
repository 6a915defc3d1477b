//! Parallel ensembles with results independent of the worker count.
//!
//! Samples are evaluated in fixed batches of [`BATCH`] and folded into the
//! accumulators in index order, so the floating-point reduction is the same
//! sequence of operations as the sequential core routines.

use rayon::prelude::*;

use qwalk_core::dynamics::{run_trajectory, EnsembleAccumulator, EnsembleResult, TrajectoryConfig};
use qwalk_core::spectral::{dos_sample, DosConfig, DosHistogram, DosSampleCounts};
use qwalk_core::transfer::{lyapunov, LyapunovConfig, LyapunovResult};

use crate::error::{Error, Result};

/// Samples evaluated between two reductions.
pub const BATCH: usize = 64;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "QWALK_THREADS";

/// A worker pool of `threads` workers, or rayon's default when `None` or 0.
pub fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Thread(format!("cannot start worker pool: {e}")))
}

fn batches(total: usize) -> impl Iterator<Item = std::ops::Range<usize>> {
    (0..total)
        .step_by(BATCH)
        .map(move |s| s..(s + BATCH).min(total))
}

/// Same result as [`qwalk_core::dynamics::run_ensemble`], bit for bit.
pub fn ensemble(config: &TrajectoryConfig, samples: usize) -> Result<EnsembleResult> {
    if samples == 0 {
        return Err(qwalk_core::Error::InvalidArgument(
            "an ensemble needs at least one sample".into(),
        )
        .into());
    }
    config.validate()?;
    let mut acc = EnsembleAccumulator::new(config);
    for range in batches(samples) {
        let trajs = range
            .into_par_iter()
            .map(|k| run_trajectory(&config.sample(k as u64)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        for t in &trajs {
            acc.push(t)?;
        }
    }
    Ok(acc.finish())
}

/// Same result as [`qwalk_core::spectral::dos_ensemble`].
pub fn dos(config: &DosConfig) -> Result<DosHistogram> {
    config.validate()?;
    let mut acc = DosSampleCounts::default();
    for range in batches(config.samples) {
        let counts = range
            .into_par_iter()
            .map(|k| dos_sample(config, k as u64))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        for c in &counts {
            acc.merge(c);
        }
    }
    Ok(DosHistogram::from_counts(config, &acc)?)
}

/// One Lyapunov estimate per configuration, in input order.
pub fn lyapunov_table(configs: &[LyapunovConfig]) -> Result<Vec<LyapunovResult>> {
    Ok(configs
        .par_iter()
        .map(lyapunov)
        .collect::<std::result::Result<Vec<_>, _>>()?)
}
