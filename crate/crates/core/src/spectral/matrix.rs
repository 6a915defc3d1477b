use alloc::vec::Vec;

use faer::Mat;

use crate::error::{Error, Result};
use crate::field::{CoinField, DisorderMode, Wall};
use crate::math;
use crate::walk::Boundary;

/// Largest lattice [`build_step_matrix`] assembles by default.
pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// Dense `U` in the basis `(n₀,R), (n₀,L), (n₁,R), …` (storage order), on a
/// ring. Real, since all coins are real rotations.
pub fn build_step_matrix(field: &CoinField, boundary: Boundary) -> Result<Mat<f64>> {
    build_step_matrix_with_cap(field, boundary, DEFAULT_DENSE_CAP)
}

pub fn build_step_matrix_with_cap(
    field: &CoinField,
    boundary: Boundary,
    cap: usize,
) -> Result<Mat<f64>> {
    if boundary != Boundary::Ring {
        return Err(Error::invalid("spectral computations need ring topology"));
    }
    let n = field.sites();
    if n > cap {
        return Err(Error::Capacity { sites: n, cap });
    }
    let rot = field.static_rotations()?;
    let mut u = Mat::<f64>::zeros(2 * n, 2 * n);
    for (i, r) in rot.iter().enumerate() {
        let up = 2 * ((i + 1) % n);
        let down = 2 * ((i + n - 1) % n) + 1;
        u[(up, 2 * i)] = r.cos;
        u[(up, 2 * i + 1)] = -r.sin;
        u[(down, 2 * i)] = r.sin;
        u[(down, 2 * i + 1)] = r.cos;
    }
    Ok(u)
}

/// Where a spectrum came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSource {
    pub mode: DisorderMode,
    pub mean: f64,
    pub width: f64,
    pub seed: u64,
    pub wall: Option<Wall>,
}

/// Eigenphases `ω_λ ∈ (−π, π]` of a unitary, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub phases: Vec<f64>,
    /// `max_λ | |λ| − 1 |`.
    pub residual: f64,
    pub source: Option<SpectrumSource>,
}

impl Spectrum {
    pub fn from_phases(mut phases: Vec<f64>) -> Self {
        phases.iter_mut().for_each(|w| *w = math::wrap_phase(*w));
        phases.sort_by(|a, b| a.total_cmp(b));
        Spectrum {
            phases,
            residual: 0.0,
            source: None,
        }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

fn orthogonality_residual(u: &Mat<f64>) -> f64 {
    let p = u.transpose() * u;
    let mut worst: f64 = 0.0;
    for j in 0..p.ncols() {
        for i in 0..p.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max(math::abs(p[(i, j)] - target));
        }
    }
    worst
}

/// All eigenphases of a dense real orthogonal matrix, from a general
/// (non-symmetric) eigensolver.
pub fn eigenphases(u: &Mat<f64>) -> Result<Spectrum> {
    if u.nrows() != u.ncols() || u.nrows() == 0 {
        return Err(Error::invalid(
            "eigenphases needs a non-empty square matrix",
        ));
    }
    let res = orthogonality_residual(u);
    if !(res < 1e-10) {
        return Err(Error::invalid(alloc::format!(
            "matrix is not unitary (residual {res:e})"
        )));
    }
    let n = u.nrows();
    let eig = u.eigenvalues().map_err(|e| {
        Error::Numerical(alloc::format!(
            "eigensolver failed on a {n}×{n} matrix (residual {res:e}): {e:?}"
        ))
    })?;
    let mut residual: f64 = 0.0;
    let phases = eig
        .iter()
        .map(|z| {
            residual = residual.max(math::abs(math::sqrt(z.norm_sqr()) - 1.0));
            math::atan2(z.im, z.re)
        })
        .collect();
    let mut s = Spectrum::from_phases(phases);
    s.residual = residual;
    Ok(s)
}

/// Assemble `U` for a static field on a ring and diagonalize it.
pub fn spectrum_of_field(field: &CoinField) -> Result<Spectrum> {
    let u = build_step_matrix(field, Boundary::Ring)?;
    let mut s = eigenphases(&u)?;
    s.source = Some(SpectrumSource {
        mode: field.mode(),
        mean: field.mean(),
        width: field.width(),
        seed: field.seed(),
        wall: field.wall(),
    });
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::WallSign;
    use crate::lattice::WalkerState;
    use crate::walk::step;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    use num_complex::Complex64;
    use rand::Rng;

    #[test]
    fn identity_coin_gives_permutation() {
        let f = CoinField::clean(4, 0.0).unwrap();
        let u = build_step_matrix(&f, Boundary::Ring).unwrap();
        for j in 0..8 {
            let col: Vec<f64> = (0..8).map(|i| u[(i, j)]).collect();
            assert_eq!(col.iter().filter(|&&x| x == 1.0).count(), 1);
            assert_eq!(col.iter().filter(|&&x| x == 0.0).count(), 7);
        }
        for i in 0..8 {
            assert_eq!((0..8).map(|j| u[(i, j)]).sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn matrix_is_orthogonal() {
        let f = CoinField::sample_spatial(0.4, 2.0, 20, 3)
            .unwrap()
            .with_wall(Wall::at_origin(WallSign::Minus))
            .unwrap();
        let u = build_step_matrix(&f, Boundary::Ring).unwrap();
        assert!(orthogonality_residual(&u) < 1e-12);
    }

    #[test]
    fn matrix_action_equals_step() {
        let f = CoinField::sample_spatial(FRAC_PI_4, 1.3, 8, 17).unwrap();
        let u = build_step_matrix(&f, Boundary::Ring).unwrap();
        let mut g = crate::rng::generator(5);
        for _ in 0..100 {
            let v: Vec<Complex64> = (0..16)
                .map(|_| Complex64::new(g.random::<f64>() - 0.5, g.random::<f64>() - 0.5))
                .collect();
            let mut s = WalkerState::from_vector(&v).unwrap();
            s.normalize().unwrap();
            let stepped = step(&s, &f, Boundary::Ring, 0).unwrap().to_vector();
            let x = s.to_vector();
            let y: Vec<Complex64> = (0..16)
                .map(|i| (0..16).map(|j| x[j] * u[(i, j)]).sum())
                .collect();
            for (a, b) in y.iter().zip(&stepped) {
                assert!((a - b).norm_sqr().sqrt() < 1e-13);
            }
        }
    }

    #[test]
    fn translation_phases_for_identity_coin() {
        // θ = 0: R moves up, L moves down; phases are ±2πm/4 on each branch.
        let f = CoinField::clean(4, 0.0).unwrap();
        let s = spectrum_of_field(&f).unwrap();
        let want = [
            -FRAC_PI_2, -FRAC_PI_2, 0.0, 0.0, FRAC_PI_2, FRAC_PI_2, PI, PI,
        ];
        assert_eq!(s.len(), 8);
        for (a, b) in s.phases.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{:?}", s.phases);
        }
        assert!(s.residual < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = CoinField::clean(8, 0.3).unwrap();
        assert!(build_step_matrix(&f, Boundary::OpenLineGuard).is_err());
        assert!(matches!(
            build_step_matrix_with_cap(&f, Boundary::Ring, 6),
            Err(Error::Capacity { sites: 8, cap: 6 })
        ));
        let t = CoinField::sample_temporal(0.3, 0.1, 8, 3, 0).unwrap();
        assert!(build_step_matrix(&t, Boundary::Ring).is_err());
        let mut m = Mat::<f64>::identity(4, 4);
        m[(0, 1)] = 0.1;
        assert!(eigenphases(&m).is_err());
    }

    #[test]
    fn clean_hadamard_has_empty_gaps() {
        let f = CoinField::clean(40, FRAC_PI_4).unwrap();
        let s = spectrum_of_field(&f).unwrap();
        for &w in &s.phases {
            assert!(w.abs() >= FRAC_PI_4 - 1e-9 && (PI - w.abs()) >= FRAC_PI_4 - 1e-9);
        }
    }
}
