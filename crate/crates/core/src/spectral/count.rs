use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::CoinField;
use crate::math;

/// General 2×2 `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct M2 {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl M2 {
    const ZERO: M2 = M2 {
        a: 0.0,
        b: 0.0,
        c: 0.0,
        d: 0.0,
    };
    const ID: M2 = M2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    fn mul(self, o: M2) -> M2 {
        M2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    fn t(self) -> M2 {
        M2 {
            a: self.a,
            b: self.c,
            c: self.b,
            d: self.d,
        }
    }

    fn add(self, o: M2) -> M2 {
        M2 {
            a: self.a + o.a,
            b: self.b + o.b,
            c: self.c + o.c,
            d: self.d + o.d,
        }
    }

    fn scale(self, s: f64) -> M2 {
        M2 {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        }
    }

    fn max_abs(self) -> f64 {
        math::abs(self.a)
            .max(math::abs(self.b))
            .max(math::abs(self.c))
            .max(math::abs(self.d))
    }

    /// `x·I − self`, symmetrized.
    fn shifted_neg(self, x: f64) -> M2 {
        let off = -0.5 * (self.b + self.c);
        M2 {
            a: x - self.a,
            b: off,
            c: off,
            d: x - self.d,
        }
    }
}

/// Symmetric 2×2 pivot with its determinant carried separately. Near
/// `x = 0` the pivots mix scales `x` and `1/x`, and `ad − b²` would cancel
/// away the small eigenvalue; the recurrence below keeps it.
#[derive(Debug, Clone, Copy)]
struct Pivot {
    m: M2,
    det: f64,
}

impl Pivot {
    fn scalar(x: f64) -> Pivot {
        Pivot {
            m: M2 {
                a: x,
                b: 0.0,
                c: 0.0,
                d: x,
            },
            det: x * x,
        }
    }

    fn inverse(self) -> Option<M2> {
        if self.det == 0.0 || !self.det.is_finite() {
            return None;
        }
        let r = 1.0 / self.det;
        let m = self.m;
        Some(M2 {
            a: m.d * r,
            b: -m.b * r,
            c: -m.c * r,
            d: m.a * r,
        })
    }

    /// `−x·I − B·P⁻¹·Bᵀ`.
    fn next(self, b: M2, x: f64) -> Option<Pivot> {
        let k = b.mul(self.inverse()?).mul(b.t());
        let det_b = b.a * b.d - b.b * b.c;
        let det = x * x + x * (k.a + k.d) + det_b * det_b / self.det;
        Some(Pivot {
            m: k.shifted_neg(-x),
            det,
        })
    }

    fn negatives(self) -> usize {
        if self.det < 0.0 {
            1
        } else if self.det > 0.0 {
            if self.m.a + self.m.d < 0.0 {
                2
            } else {
                0
            }
        } else {
            usize::from(self.m.a + self.m.d < 0.0)
        }
    }
}

/// Negative eigenvalues of a symmetric 4×4, by cyclic Jacobi rotations.
fn negatives4(mut a: [[f64; 4]; 4]) -> usize {
    for _ in 0..50 {
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..4).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * diag || off == 0.0 {
            break;
        }
        for p in 0..3 {
            for q in p + 1..4 {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (math::abs(theta) + math::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..4 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..4).filter(|&i| a[i][i] < 0.0).count()
}

/// Counts eigenphases of a static ring walk by inertia of `(U + Uᵀ)/2 − x`.
///
/// `H = (U + Uᵀ)/2` couples only neighbouring sites and has zero diagonal
/// blocks. Two adjacent sites (the wall and its right neighbour, if there is
/// a wall) close the ring; they are eliminated last through a
/// Schur complement so that the open chain `2..N−1` can be factored in one
/// sweep from each end. Taking two sites keeps the chain length even: `H` is
/// bipartite between even and odd sites, and an odd chain would carry exact
/// zero modes right at `ω = π/2`.
#[derive(Debug, Clone)]
pub struct PhaseCounter {
    /// `blocks[k]` is the `(k+1, k)` block of `H`, counting sites from the apex.
    blocks: Vec<M2>,
}

impl PhaseCounter {
    /// Smallest `|cos ω|` resolved by inertia counting.
    pub const COS_FLOOR: f64 = 1e-6;

    pub fn new(field: &CoinField) -> Result<Self> {
        let rot = field.static_rotations()?;
        let n = rot.len();
        // Start the ring at the wall so its rank-one couplings sit in the apex
        // instead of degrading the chain pivots.
        let origin = field.wall_index().map_or(0, |(i, _)| i);
        let blocks = (0..n)
            .map(|k| {
                let i = (k + origin) % n;
                let r0 = rot[i];
                let r1 = rot[(i + 1) % n];
                M2 {
                    a: 0.5 * r0.cos,
                    b: 0.5 * (r1.sin - r0.sin),
                    c: 0.0,
                    d: 0.5 * r1.cos,
                }
            })
            .collect();
        Ok(PhaseCounter { blocks })
    }

    pub fn sites(&self) -> usize {
        self.blocks.len()
    }

    /// Number of eigenphases, `2N`.
    pub fn dimension(&self) -> usize {
        2 * self.blocks.len()
    }

    /// Eigenvalues of `H` (that is, `cos ω` with multiplicity) strictly below `x`.
    ///
    /// For `|x| <` [`Self::COS_FLOOR`] the pivots mix scales `x` and `1/x` too
    /// strongly for double precision, and the count is taken from the exact
    /// `c → −c` symmetry of the spectrum instead: half of all eigenvalues,
    /// as if none fell between `0` and `x`. That window is
    /// `|ω ∓ π/2| < 10⁻⁶`.
    pub fn cos_count_below(&self, x: f64) -> Result<usize> {
        if math::abs(x) < Self::COS_FLOOR {
            return Ok(self.sites());
        }
        // A singular pivot means x sits on an eigenvalue of a sub-chain;
        // moving it by a few ulps leaves the count of H unchanged generically.
        let mut probe = x;
        for _ in 0..16 {
            if let Some(k) = self.inertia(probe) {
                return Ok(k);
            }
            probe += 4.0 * f64::EPSILON * (1.0 + math::abs(probe));
        }
        Err(Error::Numerical(alloc::format!(
            "inertia count at cos ω = {x} hit singular pivots repeatedly"
        )))
    }

    fn inertia(&self, x: f64) -> Option<usize> {
        let n = self.blocks.len();
        let b = &self.blocks;
        // Forward over chain sites 2..n−1, tracking the first-to-last
        // propagator with a separate power-of-two exponent.
        let mut neg = 0;
        let mut d = Pivot::scalar(-x);
        neg += d.negatives();
        let mut p = M2::ID;
        let mut p_exp = 0i32;
        for j in 2..n - 1 {
            let l = b[j].mul(d.inverse()?);
            d = d.next(b[j], x)?;
            neg += d.negatives();
            p = l.mul(p).scale(-1.0);
            let m = p.max_abs();
            if m > 1e100 || (m < 1e-100 && m > 0.0) {
                let e = libm::ilogb(m);
                p = p.scale(libm::scalbn(1.0, -e));
                p_exp = p_exp.saturating_add(e);
            }
        }
        let g_last = d.inverse()?;
        let g_last_first = g_last.mul(p);
        let g_last_first = if g_last_first.max_abs() == 0.0 || p_exp < -1500 {
            M2::ZERO
        } else {
            // Apply the exponent in two halves to avoid a premature overflow.
            let h = p_exp / 2;
            g_last_first
                .scale(libm::scalbn(1.0, h))
                .scale(libm::scalbn(1.0, p_exp - h))
        };
        // Backward sweep for the first chain block of the inverse.
        let mut e = Pivot::scalar(-x);
        for j in (2..n - 1).rev() {
            e = e.next(b[j].t(), x)?;
        }
        let g_first = e.inverse()?;

        // Coupling of the chain ends to the apex (sites 0, 1):
        // site 2 sees site 1 through B₁, site N−1 sees site 0 through B_{N−1}ᵀ.
        let b1 = b[1];
        let bl = b[n - 1];
        let s00 = bl.mul(g_last).mul(bl.t()).shifted_neg(-x);
        let s01 = bl.mul(g_last_first).mul(b1).scale(-1.0);
        let s11 = b1.t().mul(g_first).mul(b1).shifted_neg(-x);
        // H's own (0,1) coupling: the (1,0) block is B₀, so (0,1) is B₀ᵀ.
        let s01 = s01.add(b[0].t());
        let s = [
            [s00.a, s00.b, s01.a, s01.b],
            [s00.c, s00.d, s01.c, s01.d],
            [s01.a, s01.c, s11.a, s11.b],
            [s01.b, s01.d, s11.c, s11.d],
        ];
        if s.iter().flatten().any(|v| !v.is_finite()) {
            return None;
        }
        Some(neg + negatives4(s))
    }

    /// Eigenphases with `|ω| ≤ w`, for `w ∈ [0, π]`.
    ///
    /// Resolution follows that of `cos ω`: about `10⁻⁸` in `ω` next to `0`
    /// and `π`, and see [`Self::cos_count_below`] next to `±π/2`.
    pub fn count_within(&self, w: f64) -> Result<usize> {
        if !(0.0..=core::f64::consts::PI).contains(&w) {
            return Err(Error::invalid(alloc::format!("phase {w} outside [0, π]")));
        }
        if w == core::f64::consts::PI {
            return Ok(self.dimension());
        }
        let cut = math::cos(w);
        Ok(self.dimension() - self.cos_count_below(cut)?)
    }

    /// Eigenphases with `a < |ω| ≤ b`.
    pub fn count_between(&self, a: f64, b: f64) -> Result<usize> {
        if !(a <= b) {
            return Err(Error::invalid("count_between needs a ≤ b"));
        }
        Ok(self.count_within(b)? - self.count_within(a)?)
    }

    /// Eigenphases with `|ω| > π − tol`.
    pub fn count_near_pi(&self, tol: f64) -> Result<usize> {
        Ok(self.dimension() - self.count_within(core::f64::consts::PI - tol)?)
    }
}
