//! Fixed-point iteration for calibrated subactions.
//!
//! One iteration maps `f` to
//!
//! ```text
//! G(f) = raw - sup(raw),      raw = ( Bf + f ) / 2,
//! Bf(x) = max_j [ A(tau_j(x)) + f(tau_j(x)) ]
//! ```
//!
//! `B` is nonexpansive in sup norm and so is the averaged map; iterates
//! converge to a sup-normalized calibrated subaction `V`, and the subtracted
//! constant converges to `m(A)/2`: indeed if `BV = V + m` with `max V = 0`,
//! then `raw = V + m/2`, its supremum is `m/2`, and `G(V) = V`.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridMode, DEFAULT_RESOLUTION};
use crate::potentials::Potential;
use crate::systems::BranchSystem;

/// Default tie window when attributing the realizer branch.
pub const DEFAULT_TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub grid_n: usize,
    /// Stop when consecutive iterates are closer than this in sup norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Branch values within this window of the maximum count as ties; ties
    /// resolve to the lowest branch index.
    pub realizer_tie_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_n: DEFAULT_RESOLUTION,
            tol: 1e-9,
            max_iter: 2000,
            realizer_tie_tol: DEFAULT_TIE_TOL,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 2 {
            return Err(Error::Parameter(format!(
                "grid_n must be >= 2, got {}",
                self.grid_n
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Parameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::Parameter("max_iter must be >= 1".into()));
        }
        if self.realizer_tie_tol.is_nan() || self.realizer_tie_tol < 0.0 {
            return Err(Error::Parameter("realizer_tie_tol must be >= 0".into()));
        }
        Ok(())
    }
}

/// Converged (or truncated) output of [`solve`].
#[derive(Debug, Clone)]
pub struct SubactionResult {
    /// Sup-normalized approximate subaction.
    pub v: GridFunction,
    /// `2 c` for the final normalization constant `c`.
    pub m_estimate: f64,
    /// Index of the branch attaining the maximum at each grid node.
    pub realizer: Vec<usize>,
    /// Calibration deficiency `V(T x) - V(x) - A(x) + m`, nonnegative up to
    /// solver tolerance; zero on the Mather set.
    pub r: GridFunction,
    pub iterations: usize,
    /// `max - min` spread of `BV - V` over the grid; measures how far the
    /// final iterate is from an exact fixed point.
    pub residual: f64,
    pub converged: bool,
}

/// One admissible branch at one grid node: the potential value at the branch
/// point and the interpolation cell of the branch point in the grid.
struct StencilEntry {
    branch: usize,
    a: f64,
    left: usize,
    right: usize,
    weight: f64,
}

impl StencilEntry {
    #[inline]
    fn interpolate(&self, f: &[f64]) -> f64 {
        if self.weight == 0.0 {
            f[self.left]
        } else {
            f[self.left] * (1.0 - self.weight) + f[self.right] * self.weight
        }
    }
}

/// Precomputed evaluation data for one Bellman application: the branch
/// points `tau_j(x_i)`, the potential values there, and the interpolation
/// weights. These never change across iterations.
struct Stencil {
    per_node: Vec<Vec<StencilEntry>>,
}

impl Stencil {
    fn build(template: &GridFunction, sys: &BranchSystem, pot: &Potential) -> Result<Self> {
        let mut per_node = Vec::with_capacity(template.resolution());
        for idx in 0..template.resolution() {
            let x = template.node(idx);
            let mut entries = Vec::with_capacity(sys.branches.len());
            for (b, branch) in sys.branches.iter().enumerate() {
                let y = branch.apply(x);
                if !pot.in_domain(y) {
                    continue;
                }
                let (left, right, weight) = match template.locate(y) {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                entries.push(StencilEntry {
                    branch: b,
                    a: pot.eval(y)?,
                    left,
                    right,
                    weight,
                });
            }
            if entries.is_empty() {
                return Err(Error::Coverage { x });
            }
            per_node.push(entries);
        }
        Ok(Self { per_node })
    }

    /// Applies the Bellman maximum to the sample vector of `f`.
    fn bellman(&self, f: &[f64], tie_tol: f64) -> (Vec<f64>, Vec<usize>) {
        let n = self.per_node.len();
        let mut out = Vec::with_capacity(n);
        let mut realizer = Vec::with_capacity(n);
        for entries in &self.per_node {
            let mut best = f64::NEG_INFINITY;
            for e in entries {
                let val = e.a + e.interpolate(f);
                if val > best {
                    best = val;
                }
            }
            let mut arg = usize::MAX;
            for e in entries {
                if e.a + e.interpolate(f) >= best - tie_tol {
                    arg = e.branch;
                    break;
                }
            }
            out.push(best);
            realizer.push(arg);
        }
        (out, realizer)
    }
}

fn check_compatible(f: &GridFunction, sys: &BranchSystem, pot: &Potential) -> Result<()> {
    if f.mode() != sys.domain_mode {
        return Err(Error::Shape(format!(
            "grid mode {:?} does not match system mode {:?}",
            f.mode(),
            sys.domain_mode
        )));
    }
    if pot.domain_mode != sys.domain_mode {
        return Err(Error::Shape(format!(
            "potential mode {:?} does not match system mode {:?}",
            pot.domain_mode, sys.domain_mode
        )));
    }
    let (lo, hi) = f.domain();
    let (wlo, whi) = sys.working_interval;
    if (lo - wlo).abs() > 1e-12 || (hi - whi).abs() > 1e-12 {
        return Err(Error::Shape(format!(
            "grid domain [{lo}, {hi}] does not match working interval [{wlo}, {whi}]"
        )));
    }
    Ok(())
}

/// One Bellman maximum step: `g(x_i) = max_j [A(tau_j x_i) + f(tau_j x_i)]`
/// together with the attaining branch per node. Branches whose image point
/// falls outside the potential's domain do not compete; a node where no
/// branch is admissible is a coverage error.
pub fn bellman_max(
    f: &GridFunction,
    sys: &BranchSystem,
    pot: &Potential,
    tie_tol: f64,
) -> Result<(GridFunction, Vec<usize>)> {
    check_compatible(f, sys, pot)?;
    let stencil = Stencil::build(f, sys, pot)?;
    let (vals, realizer) = stencil.bellman(f.values(), tie_tol);
    let (lo, hi) = f.domain();
    let g = match f.mode() {
        GridMode::Periodic => GridFunction::from_values(vals, GridMode::Periodic)?,
        GridMode::Interval => GridFunction::from_values_on(vals, lo, hi)?,
    };
    Ok((g, realizer))
}

/// One iteration of the averaged map: returns the sup-normalized output, the
/// realizer, and the subtracted constant `c = sup((Bf + f)/2)`. The raw
/// (pre-normalization) iterate is `output + c`.
pub fn half_step(
    f: &GridFunction,
    sys: &BranchSystem,
    pot: &Potential,
    tie_tol: f64,
) -> Result<(GridFunction, Vec<usize>, f64)> {
    let (b, realizer) = bellman_max(f, sys, pot, tie_tol)?;
    let raw = b.zip_map(f, |bv, fv| 0.5 * (bv + fv))?;
    let (out, c) = raw.sup_normalize();
    if !c.is_finite() {
        return Err(Error::Numeric(
            "half step produced a non-finite level".into(),
        ));
    }
    Ok((out, realizer, c))
}

/// Iterates the averaged map from `f0` until the sup gap between consecutive
/// iterates drops below `cfg.tol` or `cfg.max_iter` steps have run. Running
/// out of iterations is not an error: the result is returned with
/// `converged = false`.
///
/// Internally the loop continues to a gap of `tol/4`: the deficiency `R` of
/// the returned pair `(V, m)` is only guaranteed nonnegative up to twice the
/// final gap, so stopping exactly at `tol` would leave `R` dipping to
/// `-2 tol`. The quarter-tolerance tail keeps `R >= -tol` with margin while
/// `converged` still reports whether the requested gap was reached.
pub fn solve(
    sys: &BranchSystem,
    pot: &Potential,
    f0: &GridFunction,
    cfg: &SolverConfig,
) -> Result<SubactionResult> {
    cfg.validate()?;
    check_compatible(f0, sys, pot)?;
    let stencil = Stencil::build(f0, sys, pot)?;
    let n = f0.resolution();
    let mut f: Vec<f64> = f0.values().to_vec();
    let mut c_last = 0.0;
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=cfg.max_iter {
        let (b, _) = stencil.bellman(&f, cfg.realizer_tie_tol);
        let mut c = f64::NEG_INFINITY;
        let mut raw = Vec::with_capacity(n);
        for i in 0..n {
            let v = 0.5 * (b[i] + f[i]);
            if v > c {
                c = v;
            }
            raw.push(v);
        }
        if !c.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite level at iteration {it}"
            )));
        }
        let mut gap = 0.0_f64;
        for i in 0..n {
            let next = raw[i] - c;
            gap = gap.max((next - f[i]).abs());
            f[i] = next;
        }
        if !gap.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite iterate at iteration {it}"
            )));
        }
        c_last = c;
        iterations = it;
        if gap < cfg.tol {
            converged = true;
        }
        if gap < 0.25 * cfg.tol {
            break;
        }
    }

    let m_estimate = 2.0 * c_last;
    let (bv, realizer) = stencil.bellman(&f, cfg.realizer_tie_tol);
    let mut spread_lo = f64::INFINITY;
    let mut spread_hi = f64::NEG_INFINITY;
    for i in 0..n {
        let d = bv[i] - f[i];
        spread_lo = spread_lo.min(d);
        spread_hi = spread_hi.max(d);
    }
    let (lo, hi) = f0.domain();
    let v = match f0.mode() {
        GridMode::Periodic => GridFunction::from_values(f, GridMode::Periodic)?,
        GridMode::Interval => GridFunction::from_values_on(f, lo, hi)?,
    };
    let r = compute_r(&v, m_estimate, sys, pot)?;
    Ok(SubactionResult {
        v,
        m_estimate,
        realizer,
        r,
        iterations,
        residual: spread_hi - spread_lo,
        converged,
    })
}

/// Calibration deficiency `R(x) = V(T x) - V(x) - A(x) + m` on the grid of
/// `v`. For systems without a forward map the same quantity is assembled
/// per branch image: for `x` in the image of `tau_j`,
/// `R(x) = V(tau_j^{-1} x) - V(x) - A(x) + m`, taking the minimum where
/// images overlap. Near the edges of an image, `tau_j^{-1}(x)` can leave the
/// working interval; there `V` is continued by one application of the
/// calibrated equation itself, `V(s) = max_k [A(tau_k s) + V(tau_k s)] - m`,
/// whose branch points always land back inside the working interval.
pub fn compute_r(
    v: &GridFunction,
    m: f64,
    sys: &BranchSystem,
    pot: &Potential,
) -> Result<GridFunction> {
    let n = v.resolution();
    let mut out = Vec::with_capacity(n);
    match sys.forward {
        Some(fwd) => {
            for idx in 0..n {
                let x = v.node(idx);
                let r = v.eval(fwd.apply(x))? - v.values()[idx] - pot.eval(x)? + m;
                out.push(r);
            }
        }
        None => {
            let (wlo, whi) = v.domain();
            let eval_extended = |s: f64| -> Result<f64> {
                if s >= wlo && s <= whi {
                    return v.eval(s);
                }
                let mut best = f64::NEG_INFINITY;
                let mut any = false;
                for branch in &sys.branches {
                    let y = branch.apply(s);
                    if !pot.in_domain(y) {
                        continue;
                    }
                    any = true;
                    best = best.max(pot.eval(y)? + v.eval(y)?);
                }
                if !any {
                    return Err(Error::Coverage { x: s });
                }
                Ok(best - m)
            };
            for idx in 0..n {
                let x = v.node(idx);
                let mut best: Option<f64> = None;
                for branch in &sys.branches {
                    if !branch.contains(x) {
                        continue;
                    }
                    let s = branch.map.inverse().apply(x).clamp(0.0, 1.0);
                    let r = eval_extended(s)? - v.values()[idx] - pot.eval(x)? + m;
                    best = Some(match best {
                        Some(b) => b.min(r),
                        None => r,
                    });
                }
                match best {
                    Some(r) => out.push(r),
                    None => return Err(Error::Coverage { x }),
                }
            }
        }
    }
    let (lo, hi) = v.domain();
    match v.mode() {
        GridMode::Periodic => GridFunction::from_values(out, GridMode::Periodic),
        GridMode::Interval => GridFunction::from_values_on(out, lo, hi),
    }
}

/// Per-branch deficiency on the source grid,
/// `R_j(s) = V(s) - V(tau_j s) - A(tau_j s) + m`. For iterated function
/// systems this is the primary, always well-defined form; [`compute_r`]
/// composes it back onto the branch images.
pub fn compute_r_branch(
    v: &GridFunction,
    m: f64,
    sys: &BranchSystem,
    pot: &Potential,
    branch_idx: usize,
) -> Result<GridFunction> {
    let branch = sys
        .branches
        .get(branch_idx)
        .ok_or_else(|| Error::Parameter(format!("no branch {branch_idx}")))?;
    let n = v.resolution();
    let mut out = Vec::with_capacity(n);
    for idx in 0..n {
        let s = v.node(idx);
        let y = branch.apply(s);
        out.push(v.values()[idx] - v.eval(y)? - pot.eval(y)? + m);
    }
    let (lo, hi) = v.domain();
    match v.mode() {
        GridMode::Periodic => GridFunction::from_values(out, GridMode::Periodic),
        GridMode::Interval => GridFunction::from_values_on(out, lo, hi),
    }
}

/// Maximal runs of consecutive grid nodes where `r < threshold`, as closed
/// intervals of node positions. The Mather set is contained in `{R = 0}`, so
/// these intervals localize the supports of maximizing measures.
pub fn mather_support(r: &GridFunction, threshold: f64) -> Result<Vec<(f64, f64)>> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::Parameter("threshold must be positive".into()));
    }
    let mut intervals = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..r.resolution() {
        if r.values()[i] < threshold {
            run_start.get_or_insert(i);
        } else if let Some(s) = run_start.take() {
            intervals.push((r.node(s), r.node(i - 1)));
        }
    }
    if let Some(s) = run_start {
        intervals.push((r.node(s), r.node(r.resolution() - 1)));
    }
    Ok(intervals)
}

/// Sup over the grid of `|max_j [A(tau_j x) + V(tau_j x)] - V(x) - m|`.
/// A small value certifies `(V, m)` as an approximate calibrated pair.
pub fn verify_subaction(
    v: &GridFunction,
    m: f64,
    sys: &BranchSystem,
    pot: &Potential,
) -> Result<f64> {
    let (b, _) = bellman_max(v, sys, pot, DEFAULT_TIE_TOL)?;
    let mut worst = 0.0_f64;
    for i in 0..v.resolution() {
        worst = worst.max((b.values()[i] - v.values()[i] - m).abs());
    }
    Ok(worst)
}

/// Same check against an analytically evaluable candidate, with no grid
/// interpolation: the candidate is evaluated directly at `tau_j(x)`.
pub fn verify_subaction_fn(
    v: impl Fn(f64) -> f64,
    m: f64,
    sys: &BranchSystem,
    pot: &Potential,
    points: &[f64],
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &x in points {
        let mut best = f64::NEG_INFINITY;
        let mut any = false;
        for branch in &sys.branches {
            let y = branch.apply(x);
            if !pot.in_domain(y) {
                continue;
            }
            any = true;
            best = best.max(pot.eval(y)? + v(y));
        }
        if !any {
            return Err(Error::Coverage { x });
        }
        worst = worst.max((best - v(x) - m).abs());
    }
    Ok(worst)
}

/// Piecewise-linear bump supported on `[a - eps, a + eps]` with peak `k*eps`
/// at `a`, sampled on a fresh grid. Used as a non-trivial initial condition
/// when exploring basins of attraction of distinct subactions.
pub fn bump_initial(eps: f64, a: f64, k: f64, n: usize, mode: GridMode) -> Result<GridFunction> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Parameter("bump width must be positive".into()));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Parameter(format!(
            "bump center must be inside (0,1), got {a}"
        )));
    }
    if a - eps < 0.0 || a + eps > 1.0 {
        return Err(Error::Parameter(
            "bump support must stay inside [0,1]".into(),
        ));
    }
    GridFunction::sample(n, mode, |x| {
        let d = (x - a).abs();
        if d >= eps {
            0.0
        } else {
            k * (eps - d)
        }
    })
}
