//! The one-step unitary `U = S · (Σₙ |n⟩⟨n| ⊗ Cₙ)`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::coin::Rotation;
use crate::error::{Error, Result};
use crate::field::{CoinField, DisorderMode};
use crate::lattice::WalkerState;
use crate::math;

/// Lattice topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Boundary {
    /// Periodic: the shift wraps `N/2 − 1 → −N/2` and back.
    #[default]
    Ring,
    /// Open line; a step that would push amplitude off either end fails with
    /// [`Error::BoundaryReached`] instead of losing probability.
    OpenLineGuard,
}

/// Coins acting during one step.
#[derive(Debug, Clone)]
enum Coins {
    PerSite(Vec<Rotation>),
    Uniform {
        bulk: Rotation,
        wall: Option<(usize, Rotation)>,
    },
}

impl Coins {
    fn for_field(field: &CoinField) -> Result<Self> {
        match field.mode() {
            DisorderMode::Temporal => Ok(Coins::Uniform {
                bulk: Rotation::IDENTITY,
                wall: field
                    .wall_index()
                    .map(|(i, s)| (i, Rotation::reflecting(s))),
            }),
            _ => Ok(Coins::PerSite(field.static_rotations()?)),
        }
    }

    fn update(&mut self, field: &CoinField, t: usize) -> Result<()> {
        if let Coins::Uniform { bulk, .. } = self {
            let theta = *field.angles().get(t).ok_or_else(|| {
                Error::invalid(alloc::format!(
                    "temporal field covers {} steps, step {t} requested",
                    field.angles().len()
                ))
            })?;
            *bulk = Rotation::from_angle(theta);
        }
        Ok(())
    }
}

/// In-place evolution of one walker under a fixed field.
///
/// Tracks the window of sites that can hold amplitude, so a walk started on a
/// single site costs `O(t)` per step until the front reaches the lattice ends.
#[derive(Debug, Clone)]
pub struct Walker<'f> {
    field: &'f CoinField,
    boundary: Boundary,
    state: WalkerState,
    next: WalkerState,
    coins: Coins,
    time: usize,
    /// Inclusive storage range that may be nonzero; `None` means everywhere.
    support: Option<(usize, usize)>,
}

impl<'f> Walker<'f> {
    pub fn new(state: WalkerState, field: &'f CoinField, boundary: Boundary) -> Result<Self> {
        if state.sites() != field.sites() {
            return Err(Error::invalid(alloc::format!(
                "state has {} sites but the coin field has {}",
                state.sites(),
                field.sites()
            )));
        }
        let support = support_of(&state);
        let next = WalkerState::zeros(state.sites())?;
        Ok(Walker {
            field,
            boundary,
            coins: Coins::for_field(field)?,
            state,
            next,
            time: 0,
            support,
        })
    }

    pub fn state(&self) -> &WalkerState {
        &self.state
    }

    pub fn into_state(self) -> WalkerState {
        self.state
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// Advance one step using the coins of step `self.time()`.
    pub fn advance(&mut self) -> Result<()> {
        let n = self.state.sites();
        self.coins.update(self.field, self.time)?;
        let window = match (self.support, self.boundary) {
            (Some((lo, hi)), _) if lo >= 1 && hi + 1 < n => Some((lo, hi)),
            (_, Boundary::OpenLineGuard) => {
                let (r_end, l_end) = (self.state.right[n - 1], self.state.left[0]);
                if r_end.norm_sqr() > 0.0 || l_end.norm_sqr() > 0.0 {
                    return Err(Error::BoundaryReached { step: self.time });
                }
                // Nothing leaves, so the interior update below is exact.
                Some(self.support.unwrap_or((0, n - 1)))
            }
            _ => None,
        };
        match window {
            Some((lo, hi)) => {
                let (out_lo, out_hi) = (lo.saturating_sub(1), (hi + 1).min(n - 1));
                zero_range(&mut self.next, out_lo, out_hi);
                match &self.coins {
                    Coins::PerSite(rot) => {
                        shift_open(&self.state, &mut self.next, lo, hi, |i| rot[i])
                    }
                    Coins::Uniform { bulk, wall } => {
                        let (b, w) = (*bulk, *wall);
                        shift_open(&self.state, &mut self.next, lo, hi, |i| match w {
                            Some((wi, wr)) if wi == i => wr,
                            _ => b,
                        })
                    }
                }
                self.support = Some((out_lo, out_hi));
            }
            None => {
                match &self.coins {
                    Coins::PerSite(rot) => shift_ring(&self.state, &mut self.next, |i| rot[i]),
                    Coins::Uniform { bulk, wall } => {
                        let (b, w) = (*bulk, *wall);
                        shift_ring(&self.state, &mut self.next, |i| match w {
                            Some((wi, wr)) if wi == i => wr,
                            _ => b,
                        })
                    }
                }
                self.support = None;
            }
        }
        core::mem::swap(&mut self.state, &mut self.next);
        self.time += 1;
        Ok(())
    }
}

fn support_of(state: &WalkerState) -> Option<(usize, usize)> {
    let nonzero = |i: &usize| state.right[*i].norm_sqr() > 0.0 || state.left[*i].norm_sqr() > 0.0;
    let n = state.sites();
    let lo = (0..n).find(nonzero)?;
    let hi = (0..n).rev().find(nonzero)?;
    Some((lo, hi))
}

fn zero_range(s: &mut WalkerState, lo: usize, hi: usize) {
    let z = Complex64::new(0.0, 0.0);
    s.right[lo..=hi].fill(z);
    s.left[lo..=hi].fill(z);
}

/// Coin then shift for sites `lo..=hi`, all of whose images stay on the
/// lattice. The target must be zero on `lo−1..=hi+1` beforehand.
#[inline]
fn shift_open(
    src: &WalkerState,
    dst: &mut WalkerState,
    lo: usize,
    hi: usize,
    coin: impl Fn(usize) -> Rotation,
) {
    let n = src.sites();
    for i in lo..=hi {
        let (r, l) = coin(i).apply(src.right[i], src.left[i]);
        if i + 1 < n {
            dst.right[i + 1] = r;
        }
        if i >= 1 {
            dst.left[i - 1] = l;
        }
    }
}

#[inline]
fn shift_ring(src: &WalkerState, dst: &mut WalkerState, coin: impl Fn(usize) -> Rotation) {
    let n = src.sites();
    for i in 0..n {
        let (r, l) = coin(i).apply(src.right[i], src.left[i]);
        dst.right[(i + 1) % n] = r;
        dst.left[(i + n - 1) % n] = l;
    }
}

/// Apply the coins of step `t`, then the shift.
pub fn step(
    state: &WalkerState,
    field: &CoinField,
    boundary: Boundary,
    t: usize,
) -> Result<WalkerState> {
    if state.sites() != field.sites() {
        return Err(Error::invalid(alloc::format!(
            "state has {} sites but the coin field has {}",
            state.sites(),
            field.sites()
        )));
    }
    let rot = field.rotations_at(t)?;
    let n = state.sites();
    let mut out = WalkerState::zeros(n)?;
    match boundary {
        Boundary::Ring => shift_ring(state, &mut out, |i| rot[i]),
        Boundary::OpenLineGuard => {
            if state.right[n - 1].norm_sqr() > 0.0 || state.left[0].norm_sqr() > 0.0 {
                return Err(Error::BoundaryReached { step: t });
            }
            shift_open(state, &mut out, 0, n - 1, |i| rot[i]);
        }
    }
    Ok(out)
}

/// Quasi-energy branches `±ω ∈ (−π, π]` solving `cos ω = cos k · cos θ`.
pub fn dispersion(k: f64, theta: f64) -> [f64; 2] {
    let x = (math::cos(k) * math::cos(theta)).clamp(-1.0, 1.0);
    let w = math::acos(x);
    [math::wrap_phase(w), math::wrap_phase(-w)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::WallSign;
    use crate::field::Wall;
    use crate::lattice::{initial_state, Chirality};
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hadamard_single_step_by_hand() {
        let f = CoinField::clean(8, FRAC_PI_4).unwrap();
        let s = step(&initial_state(8).unwrap(), &f, Boundary::Ring, 0).unwrap();
        let r1 = s.amplitude(1, Chirality::R).unwrap();
        let l_1 = s.amplitude(-1, Chirality::L).unwrap();
        assert!((r1 - c(0.5, -0.5)).norm_sqr() < 1e-30);
        assert!((l_1 - c(0.5, 0.5)).norm_sqr() < 1e-30);
        assert!(s.amplitude(1, Chirality::L).unwrap().norm_sqr() == 0.0);
        assert!(s.amplitude(-1, Chirality::R).unwrap().norm_sqr() == 0.0);
    }

    #[test]
    fn identity_coin_translates() {
        let f = CoinField::clean(16, 0.0).unwrap();
        let mut s = WalkerState::delta(16, 0, Chirality::R).unwrap();
        for t in 0..5 {
            s = step(&s, &f, Boundary::Ring, t).unwrap();
        }
        assert_eq!(s.amplitude(5, Chirality::R), Some(c(1.0, 0.0)));
        // and it wraps around the ring
        for t in 5..8 {
            s = step(&s, &f, Boundary::Ring, t).unwrap();
        }
        assert_eq!(s.amplitude(-8, Chirality::R), Some(c(1.0, 0.0)));
    }

    #[test]
    fn guard_rejects_leaving_amplitude() {
        let f = CoinField::clean(8, 0.0).unwrap();
        let s = WalkerState::delta(8, 3, Chirality::R).unwrap();
        assert!(matches!(
            step(&s, &f, Boundary::OpenLineGuard, 0),
            Err(Error::BoundaryReached { .. })
        ));
        let s = WalkerState::delta(8, 3, Chirality::L).unwrap();
        assert!(step(&s, &f, Boundary::OpenLineGuard, 0).is_ok());
    }

    #[test]
    fn reflecting_wall_reverses_chirality() {
        let f = CoinField::clean(8, FRAC_PI_4)
            .unwrap()
            .with_wall(Wall::at_origin(WallSign::Minus))
            .unwrap();
        // A right-mover sitting on the wall leaves as a left-mover.
        let s = WalkerState::delta(8, 0, Chirality::R).unwrap();
        let out = step(&s, &f, Boundary::Ring, 0).unwrap();
        assert_eq!(out.amplitude(-1, Chirality::L), Some(c(-1.0, 0.0)));
        assert!((out.norm_sqr() - 1.0).abs() < 1e-15);
        let s = WalkerState::delta(8, 0, Chirality::L).unwrap();
        let out = step(&s, &f, Boundary::Ring, 0).unwrap();
        assert_eq!(out.amplitude(1, Chirality::R), Some(c(1.0, 0.0)));
    }

    #[test]
    fn walker_matches_pure_step() {
        let f = CoinField::sample_spatial(FRAC_PI_4, 1.0, 12, 5)
            .unwrap()
            .with_wall(Wall::at_origin(WallSign::Minus))
            .unwrap();
        let mut w = Walker::new(initial_state(12).unwrap(), &f, Boundary::Ring).unwrap();
        let mut s = initial_state(12).unwrap();
        for t in 0..20 {
            s = step(&s, &f, Boundary::Ring, t).unwrap();
            w.advance().unwrap();
            for (a, b) in s.to_vector().iter().zip(w.state().to_vector()) {
                assert!((a - b).norm_sqr() < 1e-28, "t={t}");
            }
        }
    }

    #[test]
    fn walker_temporal_matches_pure_step() {
        let f = CoinField::sample_temporal(FRAC_PI_4, FRAC_PI_4, 10, 30, 2)
            .unwrap()
            .with_wall(Wall::at_origin(WallSign::Minus))
            .unwrap();
        let mut w = Walker::new(initial_state(10).unwrap(), &f, Boundary::Ring).unwrap();
        let mut s = initial_state(10).unwrap();
        for t in 0..30 {
            s = step(&s, &f, Boundary::Ring, t).unwrap();
            w.advance().unwrap();
            for (a, b) in s.to_vector().iter().zip(w.state().to_vector()) {
                assert!((a - b).norm_sqr() < 1e-28);
            }
        }
        assert!(w.advance().is_err());
    }

    #[test]
    fn mismatched_sizes_rejected() {
        let f = CoinField::clean(8, 0.3).unwrap();
        assert!(step(&initial_state(10).unwrap(), &f, Boundary::Ring, 0).is_err());
        assert!(Walker::new(initial_state(10).unwrap(), &f, Boundary::Ring).is_err());
    }

    #[test]
    fn dispersion_examples() {
        let [a, b] = dispersion(0.0, FRAC_PI_4);
        assert!((a - FRAC_PI_4).abs() < 1e-15 && (b + FRAC_PI_4).abs() < 1e-15);
        let [a, b] = dispersion(FRAC_PI_2, 0.3);
        assert!((a - FRAC_PI_2).abs() < 1e-15 && (b + FRAC_PI_2).abs() < 1e-15);
        for k in [0.1, 1.0, 2.5] {
            let [a, b] = dispersion(k, 0.0);
            assert!((a - k).abs() < 1e-7 && (b + k).abs() < 1e-7);
        }
        let [a, b] = dispersion(PI, 0.0);
        assert_eq!((a, b), (PI, PI));
    }
}
