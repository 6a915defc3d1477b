//! Running moments, compensated sums and straight-line fits.

use crate::error::{Error, Result};
use crate::math;

/// Welford accumulator for mean and variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            math::sqrt(self.variance() / self.count as f64)
        }
    }
}

/// Neumaier-compensated sum, used where long accumulations must not drift.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if math::abs(self.sum) >= math::abs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Result of a weighted straight-line fit `y = intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Weighted coefficient of determination.
    pub r_squared: f64,
    /// Weighted residual sum of squares.
    pub residual: f64,
    pub slope_stderr: f64,
}

/// Weighted least-squares line through `(x, y)` with weights `w` (all ones
/// when `None`).
pub fn fit_line(x: &[f64], y: &[f64], w: Option<&[f64]>) -> Result<LineFit> {
    if x.len() != y.len() || w.is_some_and(|w| w.len() != x.len()) {
        return Err(Error::invalid("fit_line: length mismatch"));
    }
    if x.len() < 2 {
        return Err(Error::fit("need at least two points"));
    }
    let weight = |i: usize| w.map_or(1.0, |w| w[i]);
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for i in 0..x.len() {
        let wi = weight(i);
        if !(wi > 0.0) || !x[i].is_finite() || !y[i].is_finite() {
            return Err(Error::fit("non-finite point or non-positive weight"));
        }
        sw += wi;
        sx += wi * x[i];
        sy += wi * y[i];
    }
    let (mx, my) = (sx / sw, sy / sw);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..x.len() {
        let wi = weight(i);
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxx += wi * dx * dx;
        sxy += wi * dx * dy;
        syy += wi * dy * dy;
    }
    if !(sxx > 0.0) {
        return Err(Error::fit("degenerate design: all abscissae equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (syy - slope * sxy).max(0.0);
    let r_squared = if syy > 0.0 { 1.0 - residual / syy } else { 1.0 };
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let slope_stderr = math::sqrt(residual / dof / sxx);
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        residual,
        slope_stderr,
    })
}

/// Exponent `a` of `y ∝ xᵃ` from a log–log fit over `x ∈ [lo, hi]`.
pub fn power_law_exponent(x: &[f64], y: &[f64], lo: f64, hi: f64) -> Result<LineFit> {
    let (lx, ly): (alloc::vec::Vec<f64>, alloc::vec::Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(xi, yi)| **xi >= lo && **xi <= hi && **xi > 0.0 && **yi > 0.0)
        .map(|(xi, yi)| (math::ln(*xi), math::ln(*yi)))
        .unzip();
    fit_line(&lx, &ly, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_stats_matches_two_pass() {
        let xs = [1.0, 4.0, 2.0, 8.0, 5.0];
        let mut s = RunningStats::new();
        xs.iter().for_each(|&x| s.push(x));
        let mean = 4.0;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 4.0;
        assert!((s.mean() - mean).abs() < 1e-15);
        assert!((s.variance() - var).abs() < 1e-12);
        assert!((s.stderr() - (var / 5.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = fit_line(&x, &y, None).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!((f.intercept - 1.0).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_design_is_error() {
        assert!(fit_line(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0], None).is_err());
        assert!(fit_line(&[1.0], &[1.0], None).is_err());
    }

    #[test]
    fn power_law_of_square() {
        let x: alloc::vec::Vec<f64> = (1..100).map(|t| t as f64).collect();
        let y: alloc::vec::Vec<f64> = x.iter().map(|t| 0.3 * t * t).collect();
        let f = power_law_exponent(&x, &y, 10.0, 90.0).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
    }
}
