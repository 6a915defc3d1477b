//! Time evolution, observables and disorder-ensemble averages.
//!
//! Ensemble averages are accumulated in sample-index order, so a parallel
//! driver that collects per-sample trajectories in order and feeds them to an
//! [`EnsembleAccumulator`] reproduces [`run_ensemble`] bit for bit.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{CoinField, DisorderMode, Wall};
use crate::lattice::{initial_state, WalkerState};
use crate::math;
use crate::rng;
use crate::stats::RunningStats;
use crate::walk::{Boundary, Walker};

/// `P_n = |ψ_{n,R}|² + |ψ_{n,L}|²` in storage order.
pub fn probability_distribution(state: &WalkerState) -> Vec<f64> {
    state
        .right()
        .iter()
        .zip(state.left())
        .map(|(r, l)| r.norm_sqr() + l.norm_sqr())
        .collect()
}

/// `P_0`, the probability on the origin.
pub fn survival_probability(state: &WalkerState) -> f64 {
    let i = state.sites() / 2;
    state.right()[i].norm_sqr() + state.left()[i].norm_sqr()
}

/// Mean and variance of the site label under `probs` (storage order, first
/// entry at site `min_site`).
pub fn position_moments(probs: &[f64], min_site: i64) -> (f64, f64) {
    let total: f64 = probs.iter().sum();
    let mean = probs
        .iter()
        .enumerate()
        .map(|(i, p)| p * (i as i64 + min_site) as f64)
        .sum::<f64>()
        / total;
    let var = probs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let d = (i as i64 + min_site) as f64 - mean;
            p * d * d
        })
        .sum::<f64>()
        / total;
    (mean, var)
}

/// `v = ⟨n²⟩ − ⟨n⟩²`.
pub fn position_variance(state: &WalkerState) -> f64 {
    position_moments(&probability_distribution(state), state.min_site()).1
}

/// Excess kurtosis `m₄/m₂² − 3` of a distribution over sites.
pub fn excess_kurtosis(probs: &[f64], min_site: i64) -> f64 {
    let total: f64 = probs.iter().sum();
    let (mean, var) = position_moments(probs, min_site);
    let m4 = probs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let d = (i as i64 + min_site) as f64 - mean;
            p * d * d * d * d
        })
        .sum::<f64>()
        / total;
    m4 / (var * var) - 3.0
}

/// Which steps get their observables recorded.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum RecordSchedule {
    /// Every step up to 100, then 40 points per decade.
    #[default]
    Default,
    Stride(usize),
    Times(Vec<usize>),
}

impl RecordSchedule {
    /// Sorted, deduplicated recording times in `0..=steps`, always including
    /// `0` and `steps`.
    pub fn times(&self, steps: usize) -> Vec<usize> {
        let mut out: Vec<usize> = match self {
            RecordSchedule::Default => {
                let mut v: Vec<usize> = (0..=steps.min(100)).collect();
                if steps > 100 {
                    let per_decade = 40.0;
                    let mut k = 0.0;
                    loop {
                        let t = math::exp(math::ln(100.0) + k * math::ln(10.0) / per_decade);
                        let t = (t + 0.5) as usize;
                        if t >= steps {
                            break;
                        }
                        v.push(t);
                        k += 1.0;
                    }
                }
                v
            }
            RecordSchedule::Stride(s) => (0..=steps).step_by((*s).max(1)).collect(),
            RecordSchedule::Times(ts) => ts.iter().copied().filter(|&t| t <= steps).collect(),
        };
        out.push(0);
        out.push(steps);
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Everything needed to reproduce one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryConfig {
    pub mode: DisorderMode,
    /// Mean coin angle `θ̄`.
    pub mean: f64,
    /// Disorder strength `δθ_s` or `δθ_t`; ignored in clean mode.
    pub width: f64,
    pub sites: usize,
    pub steps: usize,
    pub wall: Option<Wall>,
    pub boundary: Boundary,
    pub seed: u64,
    pub schedule: RecordSchedule,
    /// Steps at which the full distribution `P_n` is kept.
    pub snapshots: Vec<usize>,
}

impl TrajectoryConfig {
    /// A ring just large enough that the front never wraps, recording the
    /// default schedule and a snapshot of the last step.
    pub fn new(mode: DisorderMode, mean: f64, width: f64, steps: usize) -> Self {
        TrajectoryConfig {
            mode,
            mean,
            width,
            sites: 2 * steps + 4,
            steps,
            wall: None,
            boundary: Boundary::Ring,
            seed: 0,
            schedule: RecordSchedule::Default,
            snapshots: alloc::vec![steps],
        }
    }

    pub fn with_wall(mut self, wall: Option<Wall>) -> Self {
        self.wall = wall;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_schedule(mut self, schedule: RecordSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_snapshots(mut self, snapshots: Vec<usize>) -> Self {
        self.snapshots = snapshots;
        self
    }

    pub fn with_sites(mut self, sites: usize) -> Self {
        self.sites = sites;
        self
    }

    pub fn validate(&self) -> Result<()> {
        crate::lattice::validate_sites(self.sites)?;
        if self.sites < 2 * self.steps + 4 {
            return Err(Error::invalid(alloc::format!(
                "{} sites is too small for {} steps without wrapping (need at least {})",
                self.sites,
                self.steps,
                2 * self.steps + 4
            )));
        }
        if let Some(t) = self.snapshots.iter().find(|&&t| t > self.steps) {
            return Err(Error::invalid(alloc::format!(
                "snapshot step {t} beyond the run length {}",
                self.steps
            )));
        }
        if let RecordSchedule::Stride(0) = self.schedule {
            return Err(Error::invalid("recording stride must be positive"));
        }
        Ok(())
    }

    /// The coin field this configuration describes.
    pub fn field(&self) -> Result<CoinField> {
        let field = match self.mode {
            DisorderMode::Clean => CoinField::clean(self.sites, self.mean)?,
            DisorderMode::Spatial => {
                CoinField::sample_spatial(self.mean, self.width, self.sites, self.seed)?
            }
            DisorderMode::Temporal => CoinField::sample_temporal(
                self.mean, self.width, self.sites, self.steps, self.seed,
            )?,
        };
        field.with_optional_wall(self.wall)
    }

    /// Configuration of ensemble member `index` (seed derived from `self.seed`).
    pub fn sample(&self, index: u64) -> Self {
        let mut c = self.clone();
        c.seed = rng::stream_seed(self.seed, index);
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: usize,
    /// `P_n(t)` in storage order.
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub config: TrajectoryConfig,
    pub times: Vec<usize>,
    pub survival: Vec<f64>,
    pub variance: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    /// Largest `|Σₙ Pₙ − 1|` over the recorded steps.
    pub max_norm_error: f64,
}

impl Trajectory {
    pub fn min_site(&self) -> i64 {
        -((self.config.sites / 2) as i64)
    }

    pub fn snapshot(&self, t: usize) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| s.t == t)
    }
}

/// Evolve the initial state `|0⟩ ⊗ (|R⟩ + i|L⟩)/√2` and record observables.
pub fn run_trajectory(config: &TrajectoryConfig) -> Result<Trajectory> {
    config.validate()?;
    let field = config.field()?;
    let times = config.schedule.times(config.steps);
    let mut snap_times = config.snapshots.clone();
    snap_times.sort_unstable();
    snap_times.dedup();

    let min_site = -((config.sites / 2) as i64);
    let mut walker = Walker::new(initial_state(config.sites)?, &field, config.boundary)?;
    let mut out = Trajectory {
        config: config.clone(),
        times: Vec::with_capacity(times.len()),
        survival: Vec::with_capacity(times.len()),
        variance: Vec::with_capacity(times.len()),
        snapshots: Vec::with_capacity(snap_times.len()),
        max_norm_error: 0.0,
    };
    let mut next_record = times.iter().peekable();
    let mut next_snap = snap_times.iter().peekable();
    let mut probs = Vec::with_capacity(config.sites);
    for t in 0..=config.steps {
        let record = next_record.peek() == Some(&&t);
        let snap = next_snap.peek() == Some(&&t);
        if record || snap {
            probs.clear();
            probs.extend(
                walker
                    .state()
                    .right()
                    .iter()
                    .zip(walker.state().left())
                    .map(|(r, l)| r.norm_sqr() + l.norm_sqr()),
            );
            if record {
                next_record.next();
                let total: f64 = probs.iter().sum();
                out.max_norm_error = out.max_norm_error.max(math::abs(total - 1.0));
                out.times.push(t);
                out.survival.push(probs[config.sites / 2]);
                out.variance.push(position_moments(&probs, min_site).1);
            }
            if snap {
                next_snap.next();
                out.snapshots.push(Snapshot {
                    t,
                    probs: probs.clone(),
                });
            }
        }
        if t < config.steps {
            walker.advance()?;
        }
    }
    Ok(out)
}

/// Mean and standard error of `P_n(t)` over an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMean {
    pub t: usize,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    /// Base configuration; sample `k` ran with `config.sample(k)`.
    pub config: TrajectoryConfig,
    pub samples: usize,
    pub times: Vec<usize>,
    pub survival_mean: Vec<f64>,
    pub survival_stderr: Vec<f64>,
    /// Mean of the per-sample variances.
    pub variance_mean: Vec<f64>,
    pub variance_stderr: Vec<f64>,
    pub snapshots: Vec<SnapshotMean>,
    pub max_norm_error: f64,
}

impl EnsembleResult {
    pub fn min_site(&self) -> i64 {
        -((self.config.sites / 2) as i64)
    }

    pub fn snapshot(&self, t: usize) -> Option<&SnapshotMean> {
        self.snapshots.iter().find(|s| s.t == t)
    }
}

/// Order-sensitive accumulator of trajectories; push samples in index order.
#[derive(Debug, Clone)]
pub struct EnsembleAccumulator {
    config: TrajectoryConfig,
    times: Vec<usize>,
    survival: Vec<RunningStats>,
    variance: Vec<RunningStats>,
    snapshots: Vec<(usize, Vec<RunningStats>)>,
    samples: usize,
    max_norm_error: f64,
}

impl EnsembleAccumulator {
    pub fn new(config: &TrajectoryConfig) -> Self {
        let times = config.schedule.times(config.steps);
        let mut snaps = config.snapshots.clone();
        snaps.sort_unstable();
        snaps.dedup();
        EnsembleAccumulator {
            config: config.clone(),
            survival: alloc::vec![RunningStats::new(); times.len()],
            variance: alloc::vec![RunningStats::new(); times.len()],
            snapshots: snaps
                .into_iter()
                .map(|t| (t, alloc::vec![RunningStats::new(); config.sites]))
                .collect(),
            times,
            samples: 0,
            max_norm_error: 0.0,
        }
    }

    pub fn push(&mut self, traj: &Trajectory) -> Result<()> {
        if traj.times != self.times || traj.snapshots.len() != self.snapshots.len() {
            return Err(Error::invalid(
                "trajectory does not match the ensemble layout",
            ));
        }
        for (acc, &x) in self.survival.iter_mut().zip(&traj.survival) {
            acc.push(x);
        }
        for (acc, &x) in self.variance.iter_mut().zip(&traj.variance) {
            acc.push(x);
        }
        for ((_, accs), snap) in self.snapshots.iter_mut().zip(&traj.snapshots) {
            for (acc, &p) in accs.iter_mut().zip(&snap.probs) {
                acc.push(p);
            }
        }
        self.samples += 1;
        self.max_norm_error = self.max_norm_error.max(traj.max_norm_error);
        Ok(())
    }

    pub fn finish(self) -> EnsembleResult {
        let means = |v: &[RunningStats]| v.iter().map(RunningStats::mean).collect::<Vec<_>>();
        let errs = |v: &[RunningStats]| v.iter().map(RunningStats::stderr).collect::<Vec<_>>();
        EnsembleResult {
            samples: self.samples,
            survival_mean: means(&self.survival),
            survival_stderr: errs(&self.survival),
            variance_mean: means(&self.variance),
            variance_stderr: errs(&self.variance),
            snapshots: self
                .snapshots
                .iter()
                .map(|(t, accs)| SnapshotMean {
                    t: *t,
                    mean: means(accs),
                    stderr: errs(accs),
                })
                .collect(),
            times: self.times,
            max_norm_error: self.max_norm_error,
            config: self.config,
        }
    }
}

/// Sequential ensemble of `samples` independent realizations.
pub fn run_ensemble(config: &TrajectoryConfig, samples: usize) -> Result<EnsembleResult> {
    if samples == 0 {
        return Err(Error::invalid("an ensemble needs at least one sample"));
    }
    config.validate()?;
    let mut acc = EnsembleAccumulator::new(config);
    for k in 0..samples {
        acc.push(&run_trajectory(&config.sample(k as u64))?)?;
    }
    Ok(acc.finish())
}
