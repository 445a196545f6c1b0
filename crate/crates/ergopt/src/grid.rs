//! Sampled real functions on `[0,1]` (or a closed subinterval) with linear
//! interpolation.
//!
//! Two sampling conventions are supported. `Interval` mode stores `n` samples
//! at `x_i = lo + i*(hi-lo)/(n-1)`, endpoints included. `Periodic` mode stores
//! `n` samples at `x_i = i/n` on `[0,1)` and identifies `x = 1` with `x = 0`.
//!
//! Interpolation is deliberately piecewise linear: the subactions this crate
//! approximates are only piecewise smooth (they have kinks where the realizer
//! branch switches), and linear interpolation is monotone in the sample
//! values, which keeps the Bellman-type operators built on top of it
//! nonexpansive in sup norm.

use crate::error::{Error, Result};

/// Default grid resolution for solver runs.
pub const DEFAULT_RESOLUTION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    /// Samples at `i/n` on the circle; `x = 1` wraps to `x = 0`.
    Periodic,
    /// Samples at `lo + i*(hi-lo)/(n-1)`, both endpoints stored.
    Interval,
}

/// A real function sampled on a uniform grid, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
    mode: GridMode,
    lo: f64,
    hi: f64,
}

/// Relative slack for accepting evaluation points that drift a hair outside
/// the domain through floating-point roundoff.
const DOMAIN_SLACK: f64 = 1e-9;

/// Snap width (in units of one grid cell) inside which an evaluation point is
/// treated as sitting exactly on a node. Keeps node evaluation bit-exact.
const NODE_SNAP: f64 = 1e-9;

impl GridFunction {
    /// Builds a grid function on `[0,1]` from raw samples.
    pub fn from_values(values: Vec<f64>, mode: GridMode) -> Result<Self> {
        Self::new(values, mode, 0.0, 1.0)
    }

    /// Builds an interval-mode grid function on `[lo, hi] ⊆ [0,1]`.
    pub fn from_values_on(values: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        Self::new(values, GridMode::Interval, lo, hi)
    }

    fn new(values: Vec<f64>, mode: GridMode, lo: f64, hi: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Parameter(format!(
                "grid needs at least 2 samples, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("grid sample is not finite".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi && lo >= 0.0 && hi <= 1.0) {
            return Err(Error::Parameter(format!("bad grid domain [{lo}, {hi}]")));
        }
        if mode == GridMode::Periodic && (lo != 0.0 || hi != 1.0) {
            return Err(Error::Parameter(
                "periodic grids are only defined on [0,1]".into(),
            ));
        }
        Ok(Self {
            values,
            mode,
            lo,
            hi,
        })
    }

    /// Samples `f` at the `n` nodes of the given mode on `[0,1]`.
    pub fn sample(n: usize, mode: GridMode, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::sample_on(n, mode, 0.0, 1.0, f)
    }

    /// Samples `f` on `[lo, hi]`.
    pub fn sample_on(
        n: usize,
        mode: GridMode,
        lo: f64,
        hi: f64,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!(
                "grid needs at least 2 samples, got {n}"
            )));
        }
        let probe = Self {
            values: vec![0.0; n],
            mode,
            lo,
            hi,
        };
        let values: Vec<f64> = (0..n).map(|i| f(probe.node(i))).collect();
        Self::new(values, mode, lo, hi)
    }

    pub fn constant(n: usize, mode: GridMode, c: f64) -> Result<Self> {
        Self::from_values(vec![c; n], mode)
    }

    pub fn zeros(n: usize, mode: GridMode) -> Result<Self> {
        Self::constant(n, mode, 0.0)
    }

    pub fn zeros_on(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::from_values_on(vec![0.0; n], lo, hi)
    }

    pub fn resolution(&self) -> usize {
        self.values.len()
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid spacing between consecutive nodes.
    pub fn step(&self) -> f64 {
        let n = self.values.len() as f64;
        match self.mode {
            GridMode::Periodic => 1.0 / n,
            GridMode::Interval => (self.hi - self.lo) / (n - 1.0),
        }
    }

    /// Position of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        match self.mode {
            GridMode::Periodic => i as f64 / self.values.len() as f64,
            GridMode::Interval => {
                if i == self.values.len() - 1 {
                    self.hi
                } else {
                    self.lo + i as f64 * self.step()
                }
            }
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.node(i))
    }

    /// Locates `x` as `(left node, right node, weight)` with
    /// `value = v[left]*(1-w) + v[right]*w`. Shared by [`eval`](Self::eval)
    /// and the solver's precomputed stencils so both interpolate through the
    /// identical arithmetic path.
    pub(crate) fn locate(&self, x: f64) -> Result<(usize, usize, f64)> {
        let span = self.hi - self.lo;
        let slack = DOMAIN_SLACK * span.max(1.0);
        if !x.is_finite() || x < self.lo - slack || x > self.hi + slack {
            return Err(Error::Domain {
                x,
                lo: self.lo,
                hi: self.hi,
            });
        }
        let xc = x.clamp(self.lo, self.hi);
        let n = self.values.len();
        let t = match self.mode {
            GridMode::Periodic => xc * n as f64,
            GridMode::Interval => (xc - self.lo) / self.step(),
        };
        let mut k = t.floor();
        let mut w = t - k;
        if w < NODE_SNAP {
            w = 0.0;
        } else if w > 1.0 - NODE_SNAP {
            k += 1.0;
            w = 0.0;
        }
        let k = k as usize;
        match self.mode {
            GridMode::Periodic => {
                let i = k % n;
                let j = (k + 1) % n;
                Ok((i, j, w))
            }
            GridMode::Interval => {
                let i = k.min(n - 1);
                let j = (i + 1).min(n - 1);
                Ok((i, j, w))
            }
        }
    }

    /// Piecewise-linear interpolation, exact at grid nodes; periodic mode
    /// wraps across `x = 1`. Errors if `x` is outside the domain.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (i, j, w) = self.locate(x)?;
        if w == 0.0 {
            Ok(self.values[i])
        } else {
            Ok(self.values[i] * (1.0 - w) + self.values[j] * w)
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Returns `(self - max, max)`; the first component has supremum exactly 0.
    pub fn sup_normalize(&self) -> (GridFunction, f64) {
        let m = self.max_value();
        let mut out = self.clone();
        for v in &mut out.values {
            *v -= m;
        }
        (out, m)
    }

    /// Sup-norm distance on a shared grid; errors when resolution, mode or
    /// domain differ.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_same_shape(&self, other: &GridFunction) -> Result<()> {
        if self.values.len() != other.values.len()
            || self.mode != other.mode
            || self.lo != other.lo
            || self.hi != other.hi
        {
            return Err(Error::Shape(format!(
                "{} {:?} on [{}, {}] vs {} {:?} on [{}, {}]",
                self.values.len(),
                self.mode,
                self.lo,
                self.hi,
                other.values.len(),
                other.mode,
                other.lo,
                other.hi
            )));
        }
        Ok(())
    }

    /// Element-wise map; the result lives on the same grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        Self::new(values, self.mode, self.lo, self.hi)
    }

    /// Element-wise combination of two functions on the same grid.
    pub fn zip_map(
        &self,
        other: &GridFunction,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<GridFunction> {
        self.check_same_shape(other)?;
        let values: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(values, self.mode, self.lo, self.hi)
    }
}
