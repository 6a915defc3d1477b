//! Transfer matrices and Lyapunov exponents at fixed quasi-energy.
//!
//! On an infinite chain the eigenvalue equation `Uψ = e^{iω}ψ` is a
//! first-order recursion for the pair `(ψ_{n,R}, ψ_{n−1,L})`:
//!
//! ```text
//! ⎛ψ_{n+1,R}⎞   ⎛e^{−iω}/cos θ_n   −tan θ_n      ⎞ ⎛ψ_{n,R}  ⎞
//! ⎝ψ_{n,L}  ⎠ = ⎝−tan θ_n          e^{iω}/cos θ_n⎠ ⎝ψ_{n−1,L}⎠
//! ```
//!
//! The growth rate of a product of these is the inverse localization length.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::rng::{generator, stream_seed, uniform_angle, Pcg64};
use crate::stats::{CompensatedSum, RunningStats};

/// Coins with `|cos θ|` below this are treated as reflecting walls.
pub const SINGULAR_COS: f64 = 1e-12;
/// Shortest chain accepted by [`lyapunov`].
pub const MIN_CHAIN_LENGTH: usize = 10_000;
/// Smallest distance from `π/2` that double precision can represent.
pub const MIN_DELTA_OMEGA: f64 = 1e-15;
/// Largest distance from `π/2` accepted by [`xi_vs_energy`].
pub const MAX_DELTA_OMEGA: f64 = 1e-1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub entries: [[Complex64; 2]; 2],
}

impl TransferMatrix {
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.entries;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn determinant(&self) -> Complex64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

/// Quasi-energy, either directly or as a distance below `π/2`. The second
/// form keeps full precision in `e^{iω}` when `δω` is tiny.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Energy {
    Phase(f64),
    BelowHalfPi(f64),
}

impl Energy {
    pub fn omega(&self) -> f64 {
        match *self {
            Energy::Phase(w) => w,
            Energy::BelowHalfPi(d) => core::f64::consts::FRAC_PI_2 - d,
        }
    }

    pub fn delta_omega(&self) -> Option<f64> {
        match *self {
            Energy::Phase(_) => None,
            Energy::BelowHalfPi(d) => Some(d),
        }
    }

    /// `e^{iω}`.
    pub fn phase_factor(&self) -> Complex64 {
        match *self {
            Energy::Phase(w) => {
                let (s, c) = math::sin_cos(w);
                Complex64::new(c, s)
            }
            Energy::BelowHalfPi(d) => {
                let (s, c) = math::sin_cos(d);
                Complex64::new(s, c)
            }
        }
    }
}

fn check_cos(theta: f64, c: f64) -> Result<()> {
    if !(math::abs(c) > SINGULAR_COS) {
        return Err(Error::SingularCoin { theta });
    }
    Ok(())
}

pub fn transfer_matrix(theta: f64, omega: f64) -> Result<TransferMatrix> {
    transfer_matrix_at(theta, Energy::Phase(omega))
}

pub fn transfer_matrix_at(theta: f64, energy: Energy) -> Result<TransferMatrix> {
    if !theta.is_finite() {
        return Err(Error::invalid("non-finite coin angle"));
    }
    let (s, c) = math::sin_cos(theta);
    check_cos(theta, c)?;
    let z = energy.phase_factor();
    let t = Complex64::new(-s / c, 0.0);
    Ok(TransferMatrix {
        entries: [[z.conj() / c, t], [t, z / c]],
    })
}

/// Disorder realization along the chain: `θ_n` uniform in the configured
/// window, redrawn whenever `|cos θ_n| < 1e-12`.
struct AngleStream {
    rng: Pcg64,
    mean: f64,
    width: f64,
    resampled: u64,
}

impl AngleStream {
    const MAX_REDRAWS: u32 = 1000;

    fn next(&mut self) -> Result<(f64, f64)> {
        for _ in 0..Self::MAX_REDRAWS {
            let theta = uniform_angle(&mut self.rng, self.mean, self.width);
            let (s, c) = math::sin_cos(theta);
            if math::abs(c) > SINGULAR_COS {
                return Ok((s, c));
            }
            if self.width == 0.0 {
                return Err(Error::SingularCoin { theta });
            }
            self.resampled += 1;
        }
        Err(Error::SingularCoin { theta: self.mean })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovConfig {
    pub energy: Energy,
    pub mean: f64,
    pub width: f64,
    pub length: usize,
    pub seed: u64,
    /// Steps between renormalizations of the propagated vector.
    pub renorm_interval: usize,
    pub blocks: usize,
}

impl LyapunovConfig {
    pub fn new(energy: Energy, mean: f64, width: f64, length: usize) -> Self {
        LyapunovConfig {
            energy,
            mean,
            width,
            length,
            seed: 0,
            renorm_interval: 16,
            blocks: 100,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < MIN_CHAIN_LENGTH {
            return Err(Error::invalid(alloc::format!(
                "chain length {} below the minimum {MIN_CHAIN_LENGTH}",
                self.length
            )));
        }
        if !(self.width >= 0.0) || !self.width.is_finite() || !self.mean.is_finite() {
            return Err(Error::invalid("disorder width must be finite and ≥ 0"));
        }
        if !self.energy.omega().is_finite() {
            return Err(Error::invalid("non-finite quasi-energy"));
        }
        if let Some(d) = self.energy.delta_omega() {
            if !(d >= MIN_DELTA_OMEGA) {
                return Err(Error::invalid(alloc::format!(
                    "δω = {d:e} below the double-precision floor {MIN_DELTA_OMEGA:e}"
                )));
            }
        }
        if self.renorm_interval == 0 {
            return Err(Error::invalid("renormalization interval must be ≥ 1"));
        }
        if self.blocks < 2 || self.blocks > self.length {
            return Err(Error::invalid("block count must lie in 2..=length"));
        }
        Ok(())
    }

    fn angles(&self) -> AngleStream {
        AngleStream {
            rng: generator(stream_seed(self.seed, 0)),
            mean: self.mean,
            width: self.width,
            resampled: 0,
        }
    }

    fn start_vectors(&self) -> [[Complex64; 2]; 2] {
        let mut g = generator(stream_seed(self.seed, 1));
        let mut draw = || Complex64::new(g.random::<f64>() - 0.5, g.random::<f64>() - 0.5);
        [[draw(), draw()], [draw(), draw()]]
    }

    /// Step index at which block `b` ends.
    fn block_end(&self, b: usize) -> usize {
        (b + 1) * self.length / self.blocks
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovResult {
    /// Largest Lyapunov exponent per site, clamped at zero.
    pub gamma: f64,
    /// Unclamped estimate; can dip below zero by `O(1/N)` for extended states.
    pub gamma_raw: f64,
    /// Localization length `1/γ` in sites (`∞` when `γ = 0`).
    pub xi: f64,
    /// Standard error of `γ` from block means.
    pub stderr: f64,
    /// Standard error of `ξ`, propagated as `stderr/γ²`.
    pub xi_stderr: f64,
    pub length: usize,
    pub omega: f64,
    pub delta_omega: Option<f64>,
    pub mean: f64,
    pub width: f64,
    pub seed: u64,
    /// Angles redrawn because they hit a reflecting coin.
    pub resampled: u64,
    /// Renormalization interval in force at the end of the run.
    pub renorm_interval: usize,
    /// Times the interval was halved to avoid overflow.
    pub interval_reductions: u32,
}

/// Overflow guard: renormalize early once any squared component passes this.
const GROWTH_LIMIT: f64 = 1e150;

#[inline]
fn step_pair(v: [Complex64; 2], a: Complex64, inv_c: f64, t: f64) -> [Complex64; 2] {
    [
        (a * v[0]) * inv_c - v[1] * t,
        -(v[0] * t) + (a.conj() * v[1]) * inv_c,
    ]
}

#[inline]
fn norm(v: [Complex64; 2]) -> f64 {
    math::sqrt(v[0].norm_sqr() + v[1].norm_sqr())
}

#[inline]
fn max_component(v: [Complex64; 2]) -> f64 {
    v[0].norm_sqr().max(v[1].norm_sqr())
}

/// Growth rate of a single propagated vector.
pub fn lyapunov(config: &LyapunovConfig) -> Result<LyapunovResult> {
    config.validate()?;
    let a = config.energy.phase_factor().conj();
    let mut angles = config.angles();
    let mut v = config.start_vectors()[0];
    let n0 = norm(v);
    v = [v[0] / n0, v[1] / n0];

    let mut interval = config.renorm_interval;
    let mut reductions = 0u32;
    let mut total = CompensatedSum::default();
    let mut blocks = RunningStats::new();
    let mut since = 0usize;
    let mut start = 0usize;
    for b in 0..config.blocks {
        let end = config.block_end(b);
        let mut block = CompensatedSum::default();
        for step in start..end {
            let (s, c) = angles.next()?;
            let inv_c = 1.0 / c;
            v = step_pair(v, a, inv_c, s * inv_c);
            since += 1;
            let big = max_component(v) > GROWTH_LIMIT;
            if big && since < interval {
                interval = (interval / 2).max(1);
                reductions += 1;
            }
            if big || since >= interval || step + 1 == end {
                let r = norm(v);
                if !(r > 0.0) || !r.is_finite() {
                    return Err(Error::Numerical(alloc::format!(
                        "propagated vector degenerated at step {step} (norm {r})"
                    )));
                }
                v = [v[0] / r, v[1] / r];
                block.add(math::ln(r));
                since = 0;
            }
        }
        let sum = block.value();
        total.add(sum);
        blocks.push(sum / (end - start) as f64);
        start = end;
    }
    let raw = total.value() / config.length as f64;
    let gamma = raw.max(0.0);
    let stderr = blocks.stderr();
    Ok(LyapunovResult {
        gamma,
        gamma_raw: raw,
        xi: 1.0 / gamma,
        stderr,
        xi_stderr: stderr / (gamma * gamma),
        length: config.length,
        omega: config.energy.omega(),
        delta_omega: config.energy.delta_omega(),
        mean: config.mean,
        width: config.width,
        seed: config.seed,
        resampled: angles.resampled,
        renorm_interval: interval,
        interval_reductions: reductions,
    })
}

/// Both exponents of the product, from a two-vector frame re-orthonormalized
/// by Gram–Schmidt after every step. Waiting longer lets the singular values
/// of a few nearly reflecting coins drift apart by more than double
/// precision can resolve, and the subdominant direction is lost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovPair {
    pub gamma_max: f64,
    pub gamma_min: f64,
    pub stderr_max: f64,
    pub stderr_min: f64,
    /// `γ_max + γ_min`, zero for unimodular transfer matrices.
    pub total: f64,
    pub total_stderr: f64,
}

pub fn lyapunov_pair(config: &LyapunovConfig) -> Result<LyapunovPair> {
    config.validate()?;
    let a = config.energy.phase_factor().conj();
    let mut angles = config.angles();
    let [mut u, mut w] = config.start_vectors();
    let orthonormalize = |u: &mut [Complex64; 2], w: &mut [Complex64; 2]| -> Result<[f64; 2]> {
        let r1 = norm(*u);
        *u = [u[0] / r1, u[1] / r1];
        let proj = u[0].conj() * w[0] + u[1].conj() * w[1];
        *w = [w[0] - proj * u[0], w[1] - proj * u[1]];
        let r2 = norm(*w);
        if !(r1 > 0.0 && r2 > 0.0) || !(r1.is_finite() && r2.is_finite()) {
            return Err(Error::Numerical("two-vector frame collapsed".into()));
        }
        *w = [w[0] / r2, w[1] / r2];
        Ok([math::ln(r1), math::ln(r2)])
    };
    orthonormalize(&mut u, &mut w)?;

    let mut totals = [CompensatedSum::default(); 2];
    let mut stats = [
        RunningStats::new(),
        RunningStats::new(),
        RunningStats::new(),
    ];
    let mut start = 0usize;
    for b in 0..config.blocks {
        let end = config.block_end(b);
        let mut block = [CompensatedSum::default(); 2];
        for _ in start..end {
            let (s, c) = angles.next()?;
            let inv_c = 1.0 / c;
            u = step_pair(u, a, inv_c, s * inv_c);
            w = step_pair(w, a, inv_c, s * inv_c);
            let logs = orthonormalize(&mut u, &mut w)?;
            block[0].add(logs[0]);
            block[1].add(logs[1]);
        }
        let len = (end - start) as f64;
        let (g1, g2) = (block[0].value(), block[1].value());
        totals[0].add(g1);
        totals[1].add(g2);
        stats[0].push(g1 / len);
        stats[1].push(g2 / len);
        stats[2].push((g1 + g2) / len);
        start = end;
    }
    let n = config.length as f64;
    let (g1, g2) = (totals[0].value() / n, totals[1].value() / n);
    Ok(LyapunovPair {
        gamma_max: g1,
        gamma_min: g2,
        stderr_max: stats[0].stderr(),
        stderr_min: stats[1].stderr(),
        total: g1 + g2,
        total_stderr: stats[2].stderr(),
    })
}

/// `ξ` at `ω = π/2 − δω` for each `δω`, all on the same disorder realization.
pub fn xi_vs_energy(deltas: &[f64], base: &LyapunovConfig) -> Result<Vec<LyapunovResult>> {
    deltas
        .iter()
        .map(|&d| {
            if !(MIN_DELTA_OMEGA..=MAX_DELTA_OMEGA).contains(&d) {
                return Err(Error::invalid(alloc::format!(
                    "δω = {d:e} outside [{MIN_DELTA_OMEGA:e}, {MAX_DELTA_OMEGA:e}]"
                )));
            }
            let mut cfg = base.clone();
            cfg.energy = Energy::BelowHalfPi(d);
            lyapunov(&cfg)
        })
        .collect()
}
