//! Dynamical substrates: forward maps on `[0,1]` and their contracting
//! inverse branches.
//!
//! Every branch used here is a Moebius map `x -> (p x + q)/(r x + s)` (affine
//! maps are the `r = 0` case), so derivatives, inverses and compositions are
//! available in closed form. This keeps branch derivatives exact and lets the
//! orbit oracle solve for periodic points of branch words from a quadratic
//! equation instead of iterating.

use crate::error::{Error, Result};
use crate::grid::GridMode;

/// A 2x2 real matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Matrix2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn scale(&self, t: f64) -> Self {
        Self::new(t * self.a, t * self.b, t * self.c, t * self.d)
    }

    /// Spectral radius, i.e. the largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        let tr = self.a + self.d;
        let disc = tr * tr - 4.0 * self.det();
        if disc >= 0.0 {
            let s = disc.sqrt();
            ((tr + s).abs().max((tr - s).abs())) / 2.0
        } else {
            // complex pair: |lambda| = sqrt(det)
            self.det().abs().sqrt()
        }
    }
}

/// Moebius transformation `x -> (p x + q) / (r x + s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

impl MobiusMap {
    pub fn new(p: f64, q: f64, r: f64, s: f64) -> Self {
        Self { p, q, r, s }
    }

    pub fn affine(slope: f64, offset: f64) -> Self {
        Self::new(slope, offset, 0.0, 1.0)
    }

    pub fn apply(&self, x: f64) -> f64 {
        (self.p * x + self.q) / (self.r * x + self.s)
    }

    /// `ps - qr`, the determinant of the coefficient matrix.
    pub fn coeff_det(&self) -> f64 {
        self.p * self.s - self.q * self.r
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let den = self.r * x + self.s;
        self.coeff_det() / (den * den)
    }

    /// The inverse transformation `y -> (s y - q) / (-r y + p)`.
    pub fn inverse(&self) -> MobiusMap {
        MobiusMap::new(self.s, -self.q, -self.r, self.p)
    }

    /// Derivative of the inverse map at `y`.
    pub fn inverse_derivative(&self, y: f64) -> f64 {
        let den = self.p - self.r * y;
        self.coeff_det() / (den * den)
    }

    /// Composition `self ∘ other`, with coefficients rescaled to keep long
    /// products of branch words away from overflow.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let m = MobiusMap::new(
            self.p * other.p + self.q * other.r,
            self.p * other.q + self.q * other.s,
            self.r * other.p + self.s * other.r,
            self.r * other.q + self.s * other.s,
        );
        let scale = m.p.abs().max(m.q.abs()).max(m.r.abs()).max(m.s.abs());
        if scale > 0.0 {
            MobiusMap::new(m.p / scale, m.q / scale, m.r / scale, m.s / scale)
        } else {
            m
        }
    }

    /// Fixed points in `[0,1]`, solving `r x^2 + (s - p) x - q = 0`.
    /// Returns zero, one or two roots (a parabolic double root appears once).
    pub fn fixed_points_in_unit(&self) -> Vec<f64> {
        const SLACK: f64 = 1e-9;
        let mut roots = Vec::new();
        if self.r.abs() < 1e-300 {
            // affine: x (p - s) = -q
            if (self.p - self.s).abs() > 1e-300 {
                roots.push(self.q / (self.s - self.p));
            }
        } else {
            let a = self.r;
            let b = self.s - self.p;
            let c = -self.q;
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                // numerically stable pair of roots
                let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
                let q0 = -0.5 * (b + sgn * sq);
                let r1 = if a != 0.0 { q0 / a } else { f64::NAN };
                let r2 = if q0 != 0.0 { c / q0 } else { -b / (2.0 * a) };
                roots.push(r1);
                if (r2 - r1).abs() > 1e-12 {
                    roots.push(r2);
                }
            }
        }
        roots
            .into_iter()
            .filter(|x| x.is_finite() && *x >= -SLACK && *x <= 1.0 + SLACK)
            .map(|x| x.clamp(0.0, 1.0))
            .collect()
    }
}

/// A contracting inverse branch together with its image interval.
#[derive(Debug, Clone, Copy)]
pub struct Branch {
    pub map: MobiusMap,
    /// `map([0,1])` as an ordered interval contained in `[0,1]`.
    pub image: (f64, f64),
}

impl Branch {
    fn from_map(map: MobiusMap) -> Result<Self> {
        // denominator must not vanish on [0,1]
        let d0 = map.s;
        let d1 = map.r + map.s;
        if d0 == 0.0 || d1 == 0.0 || d0.signum() != d1.signum() {
            return Err(Error::Construction(
                "branch denominator vanishes on [0,1]".into(),
            ));
        }
        let (y0, y1) = (map.apply(0.0), map.apply(1.0));
        if !y0.is_finite() || !y1.is_finite() {
            return Err(Error::Construction("branch image is not finite".into()));
        }
        let (lo, hi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
        if lo < -1e-12 || hi > 1.0 + 1e-12 {
            return Err(Error::Construction(format!(
                "branch image [{lo}, {hi}] is not contained in [0,1]"
            )));
        }
        Ok(Self {
            map,
            image: (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0)),
        })
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.map.apply(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.map.derivative(x)
    }

    /// Supremum of `|derivative|` over `[0,1]`; the derivative of a Moebius
    /// map with pole outside `[0,1]` is monotone in modulus, so the sup sits
    /// at an endpoint.
    pub fn max_abs_derivative(&self) -> f64 {
        self.derivative(0.0).abs().max(self.derivative(1.0).abs())
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.image.0 - 1e-9 && x <= self.image.1 + 1e-9
    }
}

/// Globally defined forward maps, for systems that have one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForwardKind {
    /// `T(x) = 2x mod 1` on the circle.
    DoublingPeriodic,
    /// `T(x) = 2x` for `x <= 1/2`, `2x - 1` for `x > 1/2` on `[0,1]`.
    DoublingInterval,
    /// The weakly expanding map `x/(1-x)` on `[0,1/2]`, `2 - 1/x` on `(1/2,1]`.
    Farey,
}

impl ForwardKind {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            ForwardKind::DoublingPeriodic => {
                let y = 2.0 * x;
                if y >= 1.0 {
                    y - 1.0
                } else {
                    y
                }
            }
            ForwardKind::DoublingInterval => {
                if x <= 0.5 {
                    2.0 * x
                } else {
                    2.0 * x - 1.0
                }
            }
            ForwardKind::Farey => {
                if x <= 0.5 {
                    x / (1.0 - x)
                } else {
                    2.0 - 1.0 / x
                }
            }
        }
    }
}

/// A finite family of contracting inverse branches, optionally with the
/// forward map they invert.
#[derive(Debug, Clone)]
pub struct BranchSystem {
    pub branches: Vec<Branch>,
    pub forward: Option<ForwardKind>,
    pub domain_mode: GridMode,
    /// Interval on which the subaction equation is iterated. `[0,1]` for
    /// systems with a forward map; the convex hull of the branch images for
    /// pure iterated function systems.
    pub working_interval: (f64, f64),
}

impl BranchSystem {
    /// The doubling map `T(x) = 2x mod 1` with branches `x/2` and `(x+1)/2`.
    pub fn doubling(mode: GridMode) -> Self {
        let tau1 = Branch {
            map: MobiusMap::affine(0.5, 0.0),
            image: (0.0, 0.5),
        };
        let tau2 = Branch {
            map: MobiusMap::affine(0.5, 0.5),
            image: (0.5, 1.0),
        };
        let forward = match mode {
            GridMode::Periodic => ForwardKind::DoublingPeriodic,
            GridMode::Interval => ForwardKind::DoublingInterval,
        };
        Self {
            branches: vec![tau1, tau2],
            forward: Some(forward),
            domain_mode: mode,
            working_interval: (0.0, 1.0),
        }
    }

    /// The weakly expanding (Farey-like) map with inverse branches
    /// `x/(1+x)` and `1/(2-x)`. The first branch has derivative 1 at its
    /// fixed point 0, so it contracts strictly only on compact subsets of
    /// `(0,1]`; the iteration still works but slows down near 0.
    pub fn farey_like() -> Self {
        let tau1 = Branch {
            map: MobiusMap::new(1.0, 0.0, 1.0, 1.0),
            image: (0.0, 0.5),
        };
        let tau2 = Branch {
            map: MobiusMap::new(0.0, 1.0, -1.0, 2.0),
            image: (0.5, 1.0),
        };
        Self {
            branches: vec![tau1, tau2],
            forward: Some(ForwardKind::Farey),
            domain_mode: GridMode::Interval,
            working_interval: (0.0, 1.0),
        }
    }

    /// The iterated function system induced by a pair of 2x2 matrices, with
    /// branches
    ///
    /// ```text
    /// tau_i(x) = ((a_i - b_i) x + b_i) / ((a_i + c_i - d_i - b_i) x + b_i + d_i)
    /// ```
    ///
    /// There is no globally defined forward map; the working interval is the
    /// convex hull of the two branch images.
    pub fn mobius(a1: Matrix2, a2: Matrix2) -> Result<Self> {
        let b1 = Branch::from_map(Self::branch_map(&a1))?;
        let b2 = Branch::from_map(Self::branch_map(&a2))?;
        for (i, br) in [&b1, &b2].iter().enumerate() {
            if br.max_abs_derivative() >= 1.0 {
                return Err(Error::Construction(format!(
                    "branch {} is not a contraction of [0,1]",
                    i + 1
                )));
            }
            if br.image.1 - br.image.0 <= 0.0 {
                return Err(Error::Construction(format!(
                    "branch {} has a degenerate image",
                    i + 1
                )));
            }
        }
        let working_interval = (b1.image.0.min(b2.image.0), b1.image.1.max(b2.image.1));
        Ok(Self {
            branches: vec![b1, b2],
            forward: None,
            domain_mode: GridMode::Interval,
            working_interval,
        })
    }

    pub(crate) fn branch_map(m: &Matrix2) -> MobiusMap {
        MobiusMap::new(m.a - m.b, m.b, m.a + m.c - m.d - m.b, m.b + m.d)
    }

    pub fn is_ifs_only(&self) -> bool {
        self.forward.is_none()
    }
}
