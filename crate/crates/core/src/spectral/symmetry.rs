use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math;

use super::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeStateCounts {
    pub at_zero: usize,
    pub at_pi: usize,
}

/// Eigenphases within `tol` of `0` and of `π` (circularly, so `−π + ε` counts
/// toward `π`).
pub fn detect_edge_states(spectrum: &Spectrum, tol: f64) -> EdgeStateCounts {
    let at_zero = spectrum
        .phases
        .iter()
        .filter(|w| math::abs(**w) <= tol)
        .count();
    let at_pi = spectrum
        .phases
        .iter()
        .filter(|w| PI - math::abs(**w) <= tol)
        .count();
    EdgeStateCounts { at_zero, at_pi }
}

/// Bottleneck distance between two multisets of phases on the circle.
///
/// Both sets are cut at the midpoint of the widest gap of `a` and compared in
/// sorted order. That is exact whenever the true distance is below half that
/// gap, which covers every case where the answer is small. Returns `∞` for
/// sets of different size.
pub fn circular_multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let tau = 2.0 * PI;
    let mut sa: Vec<f64> = a.iter().map(|w| math::rem_euclid(*w, tau)).collect();
    sa.sort_by(|x, y| x.total_cmp(y));
    let mut cut = 0.0;
    let mut widest = -1.0;
    for k in 0..sa.len() {
        let next = if k + 1 < sa.len() {
            sa[k + 1]
        } else {
            sa[0] + tau
        };
        if next - sa[k] > widest {
            widest = next - sa[k];
            cut = sa[k] + 0.5 * widest;
        }
    }
    let unroll = |v: &[f64]| {
        let mut u: Vec<f64> = v.iter().map(|w| math::rem_euclid(*w - cut, tau)).collect();
        u.sort_by(|x, y| x.total_cmp(y));
        u
    };
    let (ua, ub) = (unroll(a), unroll(b));
    ua.iter()
        .zip(&ub)
        .map(|(x, y)| {
            let d = math::abs(x - y);
            d.min(tau - d)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    /// Worst mismatch under `ω → −ω`.
    pub chiral: f64,
    /// Worst mismatch under `ω → ω + π`.
    pub bipartite: f64,
    pub tol: f64,
}

impl SymmetryReport {
    pub fn holds(&self) -> bool {
        self.chiral <= self.tol && self.bipartite <= self.tol
    }

    pub fn worst(&self) -> f64 {
        self.chiral.max(self.bipartite)
    }
}

pub fn check_quadruplet_symmetry(spectrum: &Spectrum, tol: f64) -> SymmetryReport {
    let p = &spectrum.phases;
    let neg: Vec<f64> = p.iter().map(|w| -w).collect();
    let shifted: Vec<f64> = p.iter().map(|w| w + PI).collect();
    SymmetryReport {
        chiral: circular_multiset_distance(p, &neg),
        bipartite: circular_multiset_distance(p, &shifted),
        tol,
    }
}
