//! Walker states on a lattice of `N` sites labelled `n ∈ {−N/2, …, N/2 − 1}`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chirality {
    R,
    L,
}

/// Check that `sites` is an even lattice size of at least 4.
pub(crate) fn validate_sites(sites: usize) -> Result<()> {
    if sites < 4 || sites % 2 != 0 {
        return Err(Error::invalid(alloc::format!(
            "lattice size must be even and at least 4, got {sites}"
        )));
    }
    Ok(())
}

/// Amplitudes `ψ_{n,σ}`. Storage index `i = n + N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    pub(crate) right: Vec<Complex64>,
    pub(crate) left: Vec<Complex64>,
}

impl WalkerState {
    /// All-zero state (not normalized).
    pub fn zeros(sites: usize) -> Result<Self> {
        validate_sites(sites)?;
        let z = Complex64::new(0.0, 0.0);
        Ok(WalkerState {
            right: vec![z; sites],
            left: vec![z; sites],
        })
    }

    /// Build from per-site `(ψ_R, ψ_L)` pairs in storage order.
    pub fn from_pairs(pairs: &[(Complex64, Complex64)]) -> Result<Self> {
        validate_sites(pairs.len())?;
        Ok(WalkerState {
            right: pairs.iter().map(|p| p.0).collect(),
            left: pairs.iter().map(|p| p.1).collect(),
        })
    }

    /// A walker localized on one site and chirality.
    pub fn delta(sites: usize, n: i64, chirality: Chirality) -> Result<Self> {
        let mut s = Self::zeros(sites)?;
        s.set(n, chirality, Complex64::new(1.0, 0.0))?;
        Ok(s)
    }

    pub fn sites(&self) -> usize {
        self.right.len()
    }

    /// Smallest site label, `−N/2`.
    pub fn min_site(&self) -> i64 {
        -((self.sites() / 2) as i64)
    }

    pub fn index_of(&self, n: i64) -> Option<usize> {
        let i = n - self.min_site();
        (0..self.sites() as i64).contains(&i).then_some(i as usize)
    }

    pub fn site_of(&self, index: usize) -> i64 {
        index as i64 + self.min_site()
    }

    pub fn amplitude(&self, n: i64, chirality: Chirality) -> Option<Complex64> {
        let i = self.index_of(n)?;
        Some(match chirality {
            Chirality::R => self.right[i],
            Chirality::L => self.left[i],
        })
    }

    pub fn set(&mut self, n: i64, chirality: Chirality, value: Complex64) -> Result<()> {
        let i = self
            .index_of(n)
            .ok_or_else(|| Error::invalid(alloc::format!("site {n} outside the lattice")))?;
        match chirality {
            Chirality::R => self.right[i] = value,
            Chirality::L => self.left[i] = value,
        }
        Ok(())
    }

    pub fn right(&self) -> &[Complex64] {
        &self.right
    }

    pub fn left(&self) -> &[Complex64] {
        &self.left
    }

    /// `Σ_{n,σ} |ψ_{n,σ}|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.right
            .iter()
            .chain(self.left.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = math::sqrt(self.norm_sqr());
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid(
                "cannot normalize a zero or non-finite state",
            ));
        }
        for z in self.right.iter_mut().chain(self.left.iter_mut()) {
            *z /= n;
        }
        Ok(())
    }

    /// Flattened vector in the order `(n₀,R), (n₀,L), (n₁,R), …`, matching the
    /// basis of the dense step matrix.
    pub fn to_vector(&self) -> Vec<Complex64> {
        self.right
            .iter()
            .zip(&self.left)
            .flat_map(|(r, l)| [*r, *l])
            .collect()
    }

    pub fn from_vector(v: &[Complex64]) -> Result<Self> {
        if v.len() % 2 != 0 {
            return Err(Error::invalid(
                "vector length must be twice the lattice size",
            ));
        }
        let pairs: Vec<_> = v.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        Self::from_pairs(&pairs)
    }
}

/// `|0⟩ ⊗ (|R⟩ + i|L⟩)/√2`.
pub fn initial_state(sites: usize) -> Result<WalkerState> {
    let mut s = WalkerState::zeros(sites)?;
    let a = core::f64::consts::FRAC_1_SQRT_2;
    s.set(0, Chirality::R, Complex64::new(a, 0.0))?;
    s.set(0, Chirality::L, Complex64::new(0.0, a))?;
    Ok(s)
}
