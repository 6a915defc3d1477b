//! Coin operators acting on the chirality pair `(R, L)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

/// Sign of the reflecting coin `C_R^±`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WallSign {
    /// `C_R^+ = [[0, −1], [1, 0]]`.
    Plus,
    /// `C_R^− = [[0, 1], [−1, 0]]`; supports edge states for a Hadamard bulk.
    Minus,
}

/// A real rotation coin `[[c, −s], [s, c]]`.
///
/// Every coin the walk uses has this form: `C(θ)` has `(c, s) = (cos θ, sin θ)`
/// and the reflecting coins are the exact quarter turns `(0, ±1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub cos: f64,
    pub sin: f64,
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation { cos: 1.0, sin: 0.0 };

    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        let (sin, cos) = math::sin_cos(theta);
        Rotation { cos, sin }
    }

    /// The reflecting coin as an exact quarter turn.
    #[inline]
    pub fn reflecting(sign: WallSign) -> Self {
        match sign {
            WallSign::Plus => Rotation { cos: 0.0, sin: 1.0 },
            WallSign::Minus => Rotation {
                cos: 0.0,
                sin: -1.0,
            },
        }
    }

    /// Apply to `(ψ_R, ψ_L)`.
    #[inline(always)]
    pub fn apply(self, r: Complex64, l: Complex64) -> (Complex64, Complex64) {
        (r * self.cos - l * self.sin, r * self.sin + l * self.cos)
    }
}

/// A general 2×2 coin on `(R, L)`, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMatrix {
    pub entries: [[Complex64; 2]; 2],
}

impl CoinMatrix {
    pub fn new(entries: [[Complex64; 2]; 2]) -> Self {
        CoinMatrix { entries }
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        CoinMatrix::new([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]])
    }

    pub fn identity() -> Self {
        Rotation::IDENTITY.into()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.entries;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn mul(&self, rhs: &CoinMatrix) -> CoinMatrix {
        let a = &self.entries;
        let b = &rhs.entries;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        CoinMatrix::new(out)
    }

    pub fn adjoint(&self) -> CoinMatrix {
        let m = &self.entries;
        CoinMatrix::new([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn determinant(&self) -> Complex64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Largest entry of `|C†C − I|`.
    pub fn unitarity_residual(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 1.0 } else { 0.0 };
                let d = p.entries[i][j] - Complex64::new(target, 0.0);
                worst = worst.max(math::sqrt(d.norm_sqr()));
            }
        }
        worst
    }

    /// `Some` when the matrix is a real rotation `[[c, −s], [s, c]]` (to `tol`).
    pub fn as_rotation(&self, tol: f64) -> Option<Rotation> {
        let m = &self.entries;
        let real = m.iter().flatten().all(|z| math::abs(z.im) <= tol);
        if !real {
            return None;
        }
        let (c, s) = (m[0][0].re, m[1][0].re);
        let fits = math::abs(m[1][1].re - c) <= tol && math::abs(m[0][1].re + s) <= tol;
        fits.then_some(Rotation { cos: c, sin: s })
    }
}

impl From<Rotation> for CoinMatrix {
    fn from(r: Rotation) -> Self {
        CoinMatrix::from_real([[r.cos, -r.sin], [r.sin, r.cos]])
    }
}

/// The rotation coin `C(θ) = [[cos θ, −sin θ], [sin θ, cos θ]]`.
pub fn make_coin(theta: f64) -> Result<CoinMatrix> {
    if !theta.is_finite() {
        return Err(Error::invalid("coin angle must be finite"));
    }
    Ok(Rotation::from_angle(theta).into())
}

/// The reflecting coin `C_R^± = [[0, ∓1], [±1, 0]]`, which swaps the two
/// chiralities and acts as a hard wall.
pub fn make_reflecting_coin(sign: WallSign) -> CoinMatrix {
    Rotation::reflecting(sign).into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn close(a: &CoinMatrix, b: &CoinMatrix, tol: f64) -> bool {
        a.entries
            .iter()
            .flatten()
            .zip(b.entries.iter().flatten())
            .all(|(x, y)| (x - y).norm_sqr() <= tol * tol)
    }

    #[test]
    fn zero_angle_is_identity() {
        assert_eq!(make_coin(0.0).unwrap(), CoinMatrix::identity());
    }

    #[test]
    fn hadamard_angle_entries() {
        let m = make_coin(FRAC_PI_4).unwrap();
        let want = CoinMatrix::from_real([
            [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
            [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        ]);
        assert!(close(&m, &want, 1e-15));
        assert!(m.unitarity_residual() < 1e-14);
        assert!((m.determinant() - c(1.0)).norm_sqr() < 1e-28);
    }

    #[test]
    fn quarter_turn_matches_plus_wall() {
        // C(π/2) = [[0, −1], [1, 0]], the upper-sign reflecting coin.
        let m = make_coin(FRAC_PI_2).unwrap();
        assert!(close(&m, &make_reflecting_coin(WallSign::Plus), 1e-15));
        let m = make_coin(-FRAC_PI_2).unwrap();
        assert!(close(&m, &make_reflecting_coin(WallSign::Minus), 1e-15));
    }

    #[test]
    fn reflecting_coin_entries() {
        assert_eq!(
            make_reflecting_coin(WallSign::Minus),
            CoinMatrix::from_real([[0.0, 1.0], [-1.0, 0.0]])
        );
        assert_eq!(
            make_reflecting_coin(WallSign::Plus),
            CoinMatrix::from_real([[0.0, -1.0], [1.0, 0.0]])
        );
    }

    #[test]
    fn reflecting_twice_is_minus_identity() {
        let v = [Complex64::new(0.3, -1.2), Complex64::new(-0.7, 0.4)];
        for sign in [WallSign::Plus, WallSign::Minus] {
            let m = make_reflecting_coin(sign);
            let w = m.apply(m.apply(v));
            assert_eq!(w, [-v[0], -v[1]]);
        }
    }

    #[test]
    fn non_finite_angle_rejected() {
        assert!(matches!(
            make_coin(f64::NAN),
            Err(Error::InvalidArgument(_))
        ));
        assert!(make_coin(f64::INFINITY).is_err());
    }

    #[test]
    fn rotation_round_trip() {
        let r = Rotation::from_angle(0.37);
        let back = CoinMatrix::from(r).as_rotation(0.0).unwrap();
        assert_eq!(back, r);
        let general = CoinMatrix::new([
            [c(0.0), Complex64::new(0.0, 1.0)],
            [Complex64::new(0.0, 1.0), c(0.0)],
        ]);
        assert!(general.as_rotation(1e-12).is_none());
    }
}
