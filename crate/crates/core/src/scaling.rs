//! Critical forms near `ω = π/2` and their fits.
//!
//! ```text
//! ρ(δω) = ρ₀ / (δω τ |ln(δω τ)|³)        ξ(δω) = ξ₀ |ln(δω τ)|
//! ```
//!
//! Both need `0 < δω τ < 1`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::stats::fit_line;

/// Default `δω` window for `ξ` fits.
pub const XI_WINDOW: (f64, f64) = (1e-12, 1e-3);
/// Default `δω` window for DOS fits.
pub const DOS_WINDOW: (f64, f64) = (3e-4, 1e-1);
/// RMS log-residual above which a fit is reported as a model mismatch.
pub const MISMATCH_RESIDUAL: f64 = 0.1;

const MAX_ITERATIONS: usize = 200;
const GRADIENT_TOL: f64 = 1e-10;

fn log_argument(dw: f64, tau: f64) -> Result<f64> {
    let x = dw * tau;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(x));
    }
    Ok(math::ln(x))
}

pub fn eval_dos_model(dw: f64, rho0: f64, tau: f64) -> Result<f64> {
    let l = log_argument(dw, tau)?;
    Ok(rho0 / (dw * tau * math::abs(l * l * l)))
}

pub fn eval_xi_model(dw: f64, xi0: f64, tau: f64) -> Result<f64> {
    Ok(xi0 * math::abs(log_argument(dw, tau)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingModel {
    Dos,
    Xi,
}

impl ScalingModel {
    pub fn name(&self) -> &'static str {
        match self {
            ScalingModel::Dos => "dos",
            ScalingModel::Xi => "xi",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub model: ScalingModel,
    /// `ρ₀` or `ξ₀`.
    pub amplitude: f64,
    pub tau: f64,
    pub window: (f64, f64),
    /// RMS of `ln(data/model)` over the fitted points.
    pub residual: f64,
    pub points: usize,
    pub iterations: usize,
    /// Residual norm after each accepted optimizer step.
    pub trace: Vec<f64>,
}

impl ScalingFit {
    pub fn eval(&self, dw: f64) -> Result<f64> {
        match self.model {
            ScalingModel::Dos => eval_dos_model(dw, self.amplitude, self.tau),
            ScalingModel::Xi => eval_xi_model(dw, self.amplitude, self.tau),
        }
    }

    pub fn is_mismatch(&self) -> bool {
        !(self.residual <= MISMATCH_RESIDUAL)
    }

    /// Standard collapse rescaling of one measured point: `(δω τ, ρ δω τ |ln³|/ρ₀)`
    /// for the DOS, `(δω τ, ξ/ξ₀)` for `ξ`. A perfect collapse puts the DOS at
    /// `1` and `ξ` on `|ln(δω τ)|`.
    pub fn rescale(&self, dw: f64, value: f64) -> Result<RescaledPoint> {
        let model = self.eval(dw)?;
        let x = dw * self.tau;
        let y = match self.model {
            ScalingModel::Dos => value / model,
            ScalingModel::Xi => value / self.amplitude,
        };
        Ok(RescaledPoint {
            x,
            y,
            ratio: value / model,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledPoint {
    pub x: f64,
    pub y: f64,
    /// Measured over model value.
    pub ratio: f64,
}

/// Largest vertical spread between rescaled curves.
///
/// At the abscissa of every point, each curve whose `x` range covers it is
/// interpolated linearly in `(ln x, ln(data/model))`; the spread there is the
/// max − min over those curves. Points covered by a single curve contribute
/// nothing. Since all curves share the model line after rescaling, this is
/// the log-distance between the curves themselves.
pub fn collapse_scatter(curves: &[Vec<RescaledPoint>]) -> f64 {
    let logs: Vec<Vec<(f64, f64)>> = curves
        .iter()
        .map(|c| {
            let mut v: Vec<(f64, f64)> = c
                .iter()
                .map(|p| (math::ln(p.x), math::ln(p.ratio)))
                .collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            v
        })
        .collect();
    let at = |c: &[(f64, f64)], lx: f64| -> Option<f64> {
        let i = c.partition_point(|p| p.0 < lx);
        if i < c.len() && c[i].0 == lx {
            return Some(c[i].1);
        }
        if i == 0 || i == c.len() {
            return None;
        }
        let (a, b) = (c[i - 1], c[i]);
        Some(a.1 + (lx - a.0) / (b.0 - a.0) * (b.1 - a.1))
    };
    let mut worst = 0.0f64;
    for &(lx, _) in logs.iter().flatten() {
        let (mut lo, mut hi, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0);
        for y in logs.iter().filter_map(|c| at(c, lx)) {
            lo = lo.min(y);
            hi = hi.max(y);
            n += 1;
        }
        if n > 1 {
            worst = worst.max(hi - lo);
        }
    }
    worst
}

/// Spread of `ln(data/model)` over every point of every curve: the between-
/// curve scatter of [`collapse_scatter`] plus each curve's own deviation from
/// its fit.
pub fn model_scatter(curves: &[Vec<RescaledPoint>]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in curves.iter().flatten() {
        let l = math::ln(p.ratio);
        lo = lo.min(l);
        hi = hi.max(l);
    }
    if hi < lo {
        0.0
    } else {
        hi - lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiPoint {
    pub delta_omega: f64,
    pub xi: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DosPoint {
    pub delta_omega: f64,
    pub rho: f64,
}

fn in_window(dw: f64, window: (f64, f64)) -> bool {
    dw >= window.0 && dw <= window.1
}

fn rms_log_residual(model: &ScalingFit, pts: impl Iterator<Item = (f64, f64)>) -> Result<f64> {
    let (mut s, mut n) = (0.0, 0usize);
    for (dw, v) in pts {
        let r = math::ln(v / model.eval(dw)?);
        s += r * r;
        n += 1;
    }
    Ok(math::sqrt(s / n as f64))
}

/// Weighted regression of `ξ` on `ln δω`: the slope is `−ξ₀` and the
/// intercept `−ξ₀ ln τ`. Weights are `1/stderr²` when every point has a
/// positive finite error bar, uniform otherwise.
pub fn fit_xi(points: &[XiPoint], window: (f64, f64)) -> Result<ScalingFit> {
    let sel: Vec<&XiPoint> = points
        .iter()
        .filter(|p| in_window(p.delta_omega, window))
        .collect();
    if sel.len() < 6 {
        return Err(Error::fit(alloc::format!(
            "ξ fit needs ≥ 6 points in the window, got {}",
            sel.len()
        )));
    }
    if sel
        .iter()
        .any(|p| !(p.delta_omega > 0.0) || !p.xi.is_finite() || !(p.xi > 0.0))
    {
        return Err(Error::fit(
            "ξ data must be positive and finite (extended states cannot be fitted)",
        ));
    }
    let (lo, hi) = sel.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
        (lo.min(p.delta_omega), hi.max(p.delta_omega))
    });
    if hi == lo {
        return Err(Error::fit("degenerate design: all δω equal"));
    }
    if math::ln(hi / lo) < 4.0 * core::f64::consts::LN_10 {
        return Err(Error::fit("ξ fit needs δω spanning ≥ 4 decades"));
    }
    let x: Vec<f64> = sel.iter().map(|p| math::ln(p.delta_omega)).collect();
    let y: Vec<f64> = sel.iter().map(|p| p.xi).collect();
    let weighted = sel.iter().all(|p| p.stderr.is_finite() && p.stderr > 0.0);
    let w: Vec<f64> = sel.iter().map(|p| 1.0 / (p.stderr * p.stderr)).collect();
    let line = fit_line(&x, &y, weighted.then_some(&w[..]))?;
    let xi0 = -line.slope;
    if !(xi0 > 0.0) {
        return Err(Error::fit(alloc::format!(
            "fitted ξ₀ = {xi0} is not positive"
        )));
    }
    let tau = math::exp(-line.intercept / xi0);
    if !(hi * tau < 1.0) {
        return Err(Error::fit(alloc::format!(
            "fitted τ = {tau} puts δω τ ≥ 1 inside the window"
        )));
    }
    let mut fit = ScalingFit {
        model: ScalingModel::Xi,
        amplitude: xi0,
        tau,
        window,
        residual: 0.0,
        points: sel.len(),
        iterations: 1,
        trace: Vec::new(),
    };
    fit.residual = rms_log_residual(&fit, sel.iter().map(|p| (p.delta_omega, p.xi)))?;
    fit.trace.push(fit.residual);
    Ok(fit)
}

/// Least squares in `ln ρ` over `(ln ρ₀, ln τ)` by damped Gauss–Newton.
///
/// `τ` starts from `tau_init` (typically the `ξ` fit) or `1`, pulled inside
/// the window if needed; `ρ₀` starts at its optimum for that `τ`.
pub fn fit_dos(
    points: &[DosPoint],
    window: (f64, f64),
    tau_init: Option<f64>,
) -> Result<ScalingFit> {
    let sel: Vec<&DosPoint> = points
        .iter()
        .filter(|p| in_window(p.delta_omega, window))
        .collect();
    if sel.len() < 8 {
        return Err(Error::fit(alloc::format!(
            "DOS fit needs ≥ 8 points in the window, got {}",
            sel.len()
        )));
    }
    if sel
        .iter()
        .any(|p| !(p.delta_omega > 0.0) || !(p.rho > 0.0) || !p.rho.is_finite())
    {
        return Err(Error::fit("DOS data must be positive and finite"));
    }
    let lw: Vec<f64> = sel.iter().map(|p| math::ln(p.delta_omega)).collect();
    let lr: Vec<f64> = sel.iter().map(|p| math::ln(p.rho)).collect();
    let lw_max = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lw.iter().all(|&l| l == lw[0]) {
        return Err(Error::fit("degenerate design: all δω equal"));
    }

    // Residuals r_i = ln ρ_i − model_i and their Jacobian in (ln ρ₀, ln τ).
    let eval = |p: [f64; 2], r: &mut [f64], j: &mut [[f64; 2]]| -> Option<f64> {
        if !(lw_max + p[1] < 0.0) {
            return None;
        }
        let mut cost = 0.0;
        for i in 0..lw.len() {
            let lx = lw[i] + p[1];
            r[i] = lr[i] - (p[0] - lx - 3.0 * math::ln(-lx));
            j[i] = [-1.0, 1.0 + 3.0 / lx];
            cost += r[i] * r[i];
        }
        Some(cost)
    };

    let mut lt = math::ln(
        tau_init
            .filter(|t| *t > 0.0 && t.is_finite())
            .unwrap_or(1.0),
    );
    if !(lw_max + lt < 0.0) {
        lt = -lw_max - core::f64::consts::LN_2;
    }
    let l0 = lw
        .iter()
        .zip(&lr)
        .map(|(w, r)| {
            let lx = w + lt;
            r + lx + 3.0 * math::ln(-lx)
        })
        .sum::<f64>()
        / lw.len() as f64;
    let mut p = [l0, lt];
    let n = lw.len();
    let mut r = alloc::vec![0.0; n];
    let mut j = alloc::vec![[0.0; 2]; n];
    let mut cost = eval(p, &mut r, &mut j).ok_or_else(|| Error::fit("initial τ outside domain"))?;
    let mut trace = alloc::vec![math::sqrt(cost)];
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (mut a, mut g) = ([[0.0; 2]; 2], [0.0; 2]);
        for i in 0..n {
            for u in 0..2 {
                g[u] += j[i][u] * r[i];
                for v in 0..2 {
                    a[u][v] += j[i][u] * j[i][v];
                }
            }
        }
        if math::abs(g[0]).max(math::abs(g[1])) < GRADIENT_TOL {
            converged = true;
            break;
        }
        let m = [
            [a[0][0] * (1.0 + lambda), a[0][1]],
            [a[1][0], a[1][1] * (1.0 + lambda)],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let step = [
            -(m[1][1] * g[0] - m[0][1] * g[1]) / det,
            -(m[0][0] * g[1] - m[1][0] * g[0]) / det,
        ];
        if !(step[0].is_finite() && step[1].is_finite()) {
            break;
        }
        let trial = [p[0] + step[0], p[1] + step[1]];
        let (mut rt, mut jt) = (r.clone(), j.clone());
        match eval(trial, &mut rt, &mut jt) {
            Some(c) if c <= cost => {
                let small =
                    math::abs(step[0]).max(math::abs(step[1])) < 1e-14 * (1.0 + math::abs(p[1]));
                p = trial;
                cost = c;
                r = rt;
                j = jt;
                trace.push(math::sqrt(cost));
                lambda = (lambda * 0.1).max(1e-12);
                if small {
                    converged = true;
                    break;
                }
            }
            _ => lambda *= 10.0,
        }
        if lambda > 1e12 {
            // No descent left at any damping: stationary to working precision.
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Fit {
            reason: alloc::format!("no convergence in {MAX_ITERATIONS} iterations"),
            trace,
        });
    }
    Ok(ScalingFit {
        model: ScalingModel::Dos,
        amplitude: math::exp(p[0]),
        tau: math::exp(p[1]),
        window,
        residual: math::sqrt(cost / n as f64),
        points: n,
        iterations,
        trace,
    })
}
