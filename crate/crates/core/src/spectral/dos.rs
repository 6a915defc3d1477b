use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{CoinField, Wall};
use crate::math;
use crate::rng::stream_seed;

use super::PhaseCounter;

/// Clean-walk density of states, normalized over `(−π, π]`.
///
/// Zero inside the gaps, `+∞` exactly at a band edge.
pub fn clean_dos(omega: f64, theta: f64) -> f64 {
    let c2t = math::cos(theta) * math::cos(theta);
    let c2w = math::cos(omega) * math::cos(omega);
    if c2w > c2t {
        return 0.0;
    }
    if c2w == c2t {
        return f64::INFINITY;
    }
    math::abs(math::sin(omega)) / (2.0 * PI * math::sqrt(c2t - c2w))
}

/// Degeneracy tolerance for edge-state detection in a disordered ring:
/// a tenth of the mean level spacing, floored at `1e-8`.
pub fn default_edge_tolerance(sites: usize) -> f64 {
    (0.1 * 2.0 * PI / (2.0 * sites as f64)).max(1e-8)
}

#[derive(Debug, Clone, PartialEq)]
pub enum DosBins {
    /// `n` equal bins over `(−π, π]`; `n` must be even so `0` is an edge.
    Uniform(usize),
    /// Ascending edges in `[0, π]` for `|ω|`; the negative side is the mirror
    /// image and is not stored.
    Symmetric(Vec<f64>),
}

impl DosBins {
    /// Bin edges on the `|ω|` axis that the counter is probed at.
    fn abs_edges(&self) -> Result<Vec<f64>> {
        match self {
            DosBins::Uniform(n) => {
                if *n < 2 || n % 2 != 0 {
                    return Err(Error::invalid(alloc::format!(
                        "uniform DOS needs an even bin count ≥ 2, got {n}"
                    )));
                }
                let half = n / 2;
                Ok((0..=half).map(|j| PI * j as f64 / half as f64).collect())
            }
            DosBins::Symmetric(e) => {
                if e.len() < 2
                    || e.windows(2).any(|w| !(w[0] < w[1]))
                    || !(e[0] >= 0.0)
                    || !(e[e.len() - 1] <= PI)
                {
                    return Err(Error::invalid(
                        "symmetric DOS edges must be ascending inside [0, π]",
                    ));
                }
                Ok(e.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DosConfig {
    pub mean: f64,
    pub width: f64,
    pub sites: usize,
    pub samples: usize,
    pub bins: DosBins,
    pub seed: u64,
    pub wall: Option<Wall>,
    /// Eigenphases within this distance of `0` or `π` are counted as edge
    /// states and kept out of the density. `None` keeps everything in.
    pub edge_tol: Option<f64>,
}

impl DosConfig {
    pub fn new(mean: f64, width: f64, sites: usize, samples: usize) -> Self {
        DosConfig {
            mean,
            width,
            sites,
            samples,
            bins: DosBins::Uniform(1024),
            seed: 0,
            wall: None,
            edge_tol: None,
        }
    }

    pub fn field(&self, index: u64) -> Result<CoinField> {
        CoinField::sample_spatial(
            self.mean,
            self.width,
            self.sites,
            stream_seed(self.seed, index),
        )?
        .with_optional_wall(self.wall)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("DOS needs at least one sample"));
        }
        if let Some(t) = self.edge_tol {
            if !(t > 0.0 && t < PI / 2.0) {
                return Err(Error::invalid(alloc::format!(
                    "edge tolerance {t} out of range"
                )));
            }
        }
        self.bins.abs_edges().map(|_| ())
    }
}

/// Integer counts from one or more realizations. Merging is a bin-wise sum,
/// so any grouping of samples gives the same totals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DosSampleCounts {
    /// Eigenphases per `|ω|` bin.
    pub abs_counts: Vec<u64>,
    pub at_zero: u64,
    pub at_pi: u64,
    /// All eigenphases seen, edge states included.
    pub total: u64,
    pub samples: u64,
}

impl DosSampleCounts {
    pub fn merge(&mut self, other: &DosSampleCounts) {
        if self.abs_counts.is_empty() {
            self.abs_counts = alloc::vec![0; other.abs_counts.len()];
        }
        for (a, b) in self.abs_counts.iter_mut().zip(&other.abs_counts) {
            *a += b;
        }
        self.at_zero += other.at_zero;
        self.at_pi += other.at_pi;
        self.total += other.total;
        self.samples += other.samples;
    }
}

/// Counts for realization `index` of `config`.
pub fn dos_sample(config: &DosConfig, index: u64) -> Result<DosSampleCounts> {
    config.validate()?;
    let edges = config.bins.abs_edges()?;
    let pc = PhaseCounter::new(&config.field(index)?)?;
    let dim = pc.dimension();
    let tol = config.edge_tol.unwrap_or(0.0);
    // Cumulative count of |ω| ≤ w, with the edge-state windows clipped off.
    let within = |w: f64| -> Result<usize> {
        let w = w.clamp(tol, PI - tol);
        if w <= 0.0 {
            Ok(0)
        } else if w >= PI {
            Ok(dim)
        } else {
            pc.count_within(w)
        }
    };
    let cum = edges
        .iter()
        .map(|&e| within(e))
        .collect::<Result<Vec<_>>>()?;
    let (at_zero, at_pi) = match config.edge_tol {
        Some(t) => (pc.count_within(t)?, dim - pc.count_within(PI - t)?),
        None => (0, 0),
    };
    Ok(DosSampleCounts {
        abs_counts: cum.windows(2).map(|w| (w[1] - w[0]) as u64).collect(),
        at_zero: at_zero as u64,
        at_pi: at_pi as u64,
        total: dim as u64,
        samples: 1,
    })
}

/// Disorder-averaged density of states.
#[derive(Debug, Clone, PartialEq)]
pub struct DosHistogram {
    /// Bin edges. For [`DosBins::Uniform`] they span `(−π, π]`; for
    /// [`DosBins::Symmetric`] they lie in `[0, π]` and `ρ(−ω) = ρ(ω)`.
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    pub symmetric: bool,
    pub samples: u64,
    pub sites: usize,
    /// Mean number of edge states per realization near `0` and `π`.
    pub edge_states: (f64, f64),
    pub edge_tol: Option<f64>,
}

impl DosHistogram {
    pub fn from_counts(config: &DosConfig, counts: &DosSampleCounts) -> Result<Self> {
        config.validate()?;
        let abs_edges = config.bins.abs_edges()?;
        if counts.abs_counts.len() + 1 != abs_edges.len() || counts.samples == 0 {
            return Err(Error::invalid("counts do not match the bin layout"));
        }
        let included = (counts.total - counts.at_zero - counts.at_pi) as f64;
        if included <= 0.0 {
            return Err(Error::Numerical(
                "no eigenphases left outside edge windows".into(),
            ));
        }
        // Each |ω| count splits evenly over the two mirror bins.
        let half: Vec<f64> = counts
            .abs_counts
            .iter()
            .zip(abs_edges.windows(2))
            .map(|(&c, w)| 0.5 * c as f64 / (included * (w[1] - w[0])))
            .collect();
        let (edges, density, symmetric) = match config.bins {
            DosBins::Uniform(_) => {
                let mut edges: Vec<f64> = abs_edges.iter().rev().map(|e| -e).collect();
                edges[0] = -PI;
                edges.extend_from_slice(&abs_edges[1..]);
                let mut density: Vec<f64> = half.iter().rev().copied().collect();
                density.extend_from_slice(&half);
                (edges, density, false)
            }
            DosBins::Symmetric(_) => (abs_edges, half, true),
        };
        let m = counts.samples as f64;
        Ok(DosHistogram {
            edges,
            density,
            symmetric,
            samples: counts.samples,
            sites: config.sites,
            edge_states: (counts.at_zero as f64 / m, counts.at_pi as f64 / m),
            edge_tol: config.edge_tol,
        })
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// `∫ρ dω` over the stored bins, counting the mirror half for symmetric
    /// histograms.
    pub fn integral(&self) -> f64 {
        let s: f64 = self
            .density
            .iter()
            .zip(self.edges.windows(2))
            .map(|(r, w)| r * (w[1] - w[0]))
            .sum();
        if self.symmetric {
            2.0 * s
        } else {
            s
        }
    }

    /// Mean density over the bins that overlap `[lo, hi]`, weighted by bin width.
    pub fn window_mean(&self, lo: f64, hi: f64) -> Option<f64> {
        let (mut num, mut den) = (0.0, 0.0);
        for (r, w) in self.density.iter().zip(self.edges.windows(2)) {
            let overlap = w[1].min(hi) - w[0].max(lo);
            if overlap > 0.0 {
                num += r * (w[1] - w[0]);
                den += w[1] - w[0];
            }
        }
        (den > 0.0).then(|| num / den)
    }
}

/// Sequential ensemble DOS over samples `0..config.samples`.
pub fn dos_ensemble(config: &DosConfig) -> Result<DosHistogram> {
    config.validate()?;
    let mut acc = DosSampleCounts::default();
    for k in 0..config.samples {
        acc.merge(&dos_sample(config, k as u64)?);
    }
    DosHistogram::from_counts(config, &acc)
}
