//! Disorder realizations: which coin acts on which site at which step.

use alloc::vec::Vec;

use crate::coin::{Rotation, WallSign};
use crate::error::{Error, Result};
use crate::lattice::validate_sites;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DisorderMode {
    Clean,
    /// Static angles drawn independently per site.
    Spatial,
    /// One angle per time step, shared by all sites.
    Temporal,
}

/// A reflecting coin replacing the rotation coin on one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wall {
    pub site: i64,
    pub sign: WallSign,
}

impl Wall {
    pub fn at_origin(sign: WallSign) -> Self {
        Wall { site: 0, sign }
    }
}

/// Coin angles for one disorder realization.
///
/// `angles` holds one entry per site for [`DisorderMode::Clean`] and
/// [`DisorderMode::Spatial`], and one entry per time step for
/// [`DisorderMode::Temporal`]. Angles are stored unreduced, in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinField {
    mode: DisorderMode,
    mean: f64,
    width: f64,
    sites: usize,
    seed: u64,
    angles: Vec<f64>,
    wall: Option<Wall>,
}

fn check_disorder(mean: f64, width: f64) -> Result<()> {
    if !mean.is_finite() {
        return Err(Error::invalid("mean angle must be finite"));
    }
    if !(width >= 0.0) || !width.is_finite() {
        return Err(Error::invalid(
            "disorder strength must be finite and non-negative",
        ));
    }
    Ok(())
}

impl CoinField {
    /// Uniform coin `C(θ)` on every site.
    pub fn clean(sites: usize, theta: f64) -> Result<Self> {
        validate_sites(sites)?;
        check_disorder(theta, 0.0)?;
        Ok(CoinField {
            mode: DisorderMode::Clean,
            mean: theta,
            width: 0.0,
            sites,
            seed: 0,
            angles: alloc::vec![theta; sites],
            wall: None,
        })
    }

    /// Independent uniform angles on `[θ̄ − δθ/2, θ̄ + δθ/2]` per site.
    pub fn sample_spatial(mean: f64, width: f64, sites: usize, seed: u64) -> Result<Self> {
        validate_sites(sites)?;
        check_disorder(mean, width)?;
        let mut g = rng::generator(seed);
        let angles = (0..sites)
            .map(|_| rng::uniform_angle(&mut g, mean, width))
            .collect();
        Ok(CoinField {
            mode: DisorderMode::Spatial,
            mean,
            width,
            sites,
            seed,
            angles,
            wall: None,
        })
    }

    /// A fresh uniform angle for each of `steps` time steps, shared by all
    /// sites.
    pub fn sample_temporal(
        mean: f64,
        width: f64,
        sites: usize,
        steps: usize,
        seed: u64,
    ) -> Result<Self> {
        validate_sites(sites)?;
        check_disorder(mean, width)?;
        let mut g = rng::generator(seed);
        let angles = (0..steps)
            .map(|_| rng::uniform_angle(&mut g, mean, width))
            .collect();
        Ok(CoinField {
            mode: DisorderMode::Temporal,
            mean,
            width,
            sites,
            seed,
            angles,
            wall: None,
        })
    }

    /// Field built from explicit per-site angles (spatial mode, seed 0).
    pub fn from_site_angles(angles: Vec<f64>) -> Result<Self> {
        validate_sites(angles.len())?;
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("coin angles must be finite"));
        }
        let n = angles.len() as f64;
        let mean = angles.iter().sum::<f64>() / n;
        Ok(CoinField {
            mode: DisorderMode::Spatial,
            mean,
            width: 0.0,
            sites: angles.len(),
            seed: 0,
            angles,
            wall: None,
        })
    }

    pub fn with_wall(mut self, wall: Wall) -> Result<Self> {
        let half = (self.sites / 2) as i64;
        if !(-half..half).contains(&wall.site) {
            return Err(Error::invalid(alloc::format!(
                "wall site {} outside the lattice",
                wall.site
            )));
        }
        self.wall = Some(wall);
        Ok(self)
    }

    pub fn with_optional_wall(self, wall: Option<Wall>) -> Result<Self> {
        match wall {
            Some(w) => self.with_wall(w),
            None => Ok(self),
        }
    }

    pub fn mode(&self) -> DisorderMode {
        self.mode
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn wall(&self) -> Option<Wall> {
        self.wall
    }

    /// Per-site angles (clean/spatial) or per-step angles (temporal).
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Number of steps a temporal field covers; `None` otherwise.
    pub fn steps(&self) -> Option<usize> {
        (self.mode == DisorderMode::Temporal).then_some(self.angles.len())
    }

    pub(crate) fn wall_index(&self) -> Option<(usize, WallSign)> {
        self.wall
            .map(|w| ((w.site + (self.sites / 2) as i64) as usize, w.sign))
    }

    /// Coin rotations acting at time step `t`, in storage order.
    pub fn rotations_at(&self, t: usize) -> Result<Vec<Rotation>> {
        let mut out = alloc::vec![Rotation::IDENTITY; self.sites];
        self.fill_rotations(t, &mut out)?;
        Ok(out)
    }

    pub(crate) fn fill_rotations(&self, t: usize, out: &mut [Rotation]) -> Result<()> {
        if out.len() != self.sites {
            return Err(Error::invalid("rotation buffer does not match the lattice"));
        }
        match self.mode {
            DisorderMode::Temporal => {
                let theta = *self.angles.get(t).ok_or_else(|| {
                    Error::invalid(alloc::format!(
                        "temporal field covers {} steps, step {t} requested",
                        self.angles.len()
                    ))
                })?;
                out.fill(Rotation::from_angle(theta));
            }
            DisorderMode::Clean | DisorderMode::Spatial => {
                for (r, &a) in out.iter_mut().zip(&self.angles) {
                    *r = Rotation::from_angle(a);
                }
            }
        }
        if let Some((i, sign)) = self.wall_index() {
            out[i] = Rotation::reflecting(sign);
        }
        Ok(())
    }

    /// Static per-site rotations; rejects temporal fields.
    pub fn static_rotations(&self) -> Result<Vec<Rotation>> {
        if self.mode == DisorderMode::Temporal {
            return Err(Error::invalid(
                "a temporal field has no static coin configuration",
            ));
        }
        self.rotations_at(0)
    }
}
