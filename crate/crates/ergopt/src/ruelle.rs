//! Principal eigenpair of the transfer (Ruelle) operator
//!
//! ```text
//! L_A f(x) = sum_j e^{A(tau_j x)} f(tau_j x)
//! ```
//!
//! via the log-domain averaged iteration: with `G~(g) = g/2 + log(L_A e^g)/2`
//! and `G(g) = G~(g) - G~(g)(0.5)`, a fixed point `h` of `G` gives the
//! eigenfunction `phi = e^h` and the subtracted constant is `log(lambda)/2`.
//! `G~` is nonexpansive in sup norm, so iterating from `g = 0` converges for
//! the same reason the subaction iteration does.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridMode};
use crate::potentials::Potential;
use crate::solver::SolverConfig;
use crate::systems::BranchSystem;

/// Point at which the eigenvalue is read off as `L_A(phi)(x)/phi(x)`.
pub const LAMBDA_POINT: f64 = 0.4;

/// Normalization point of the log-iteration; must be a grid node.
pub const NORMALIZATION_POINT: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct RuelleResult {
    /// Log-eigenfunction, normalized by `h(0.5) = 0`.
    pub h: GridFunction,
    pub lambda: f64,
    /// `sup |L_A phi - lambda phi| / sup phi`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// One application of the transfer operator to nonnegative samples.
pub fn ruelle_apply(f: &GridFunction, sys: &BranchSystem, pot: &Potential) -> Result<GridFunction> {
    if f.min_value() < 0.0 {
        return Err(Error::Domain {
            x: f.min_value(),
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let n = f.resolution();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = f.node(i);
        let mut acc = 0.0;
        for branch in &sys.branches {
            let y = branch.apply(x);
            if !pot.in_domain(y) {
                return Err(Error::Coverage { x });
            }
            acc += pot.eval(y)?.exp() * f.eval(y)?;
        }
        out.push(acc);
    }
    let (lo, hi) = f.domain();
    match f.mode() {
        GridMode::Periodic => GridFunction::from_values(out, GridMode::Periodic),
        GridMode::Interval => GridFunction::from_values_on(out, lo, hi),
    }
}

/// One step of the normalized log iteration `G`.
pub fn half_log_step(
    g: &GridFunction,
    sys: &BranchSystem,
    pot: &Potential,
) -> Result<GridFunction> {
    let exp_g = g.map(f64::exp)?;
    let l = ruelle_apply(&exp_g, sys, pot)?;
    let tilde = g.zip_map(&l, |gv, lv| 0.5 * gv + 0.5 * lv.ln())?;
    let center = tilde.eval(NORMALIZATION_POINT)?;
    if !center.is_finite() {
        return Err(Error::Numeric(
            "log step produced a non-finite level".into(),
        ));
    }
    tilde.map(|v| v - center)
}

/// Iterates `G` from `g = 0` until consecutive iterates are `cfg.tol`-close
/// in sup norm. The grid must make the normalization point `0.5` an exact
/// node: even `n` in periodic mode, odd `n` in interval mode.
pub fn eigen_solve(
    sys: &BranchSystem,
    pot: &Potential,
    cfg: &SolverConfig,
) -> Result<RuelleResult> {
    cfg.validate()?;
    let (lo, hi) = sys.working_interval;
    let g0 = match sys.domain_mode {
        GridMode::Periodic => GridFunction::zeros(cfg.grid_n, GridMode::Periodic)?,
        GridMode::Interval => GridFunction::zeros_on(cfg.grid_n, lo, hi)?,
    };
    let (_, _, w) = g0.locate(NORMALIZATION_POINT)?;
    if w != 0.0 {
        return Err(Error::Parameter(format!(
            "0.5 must be a grid node (use {} n in {:?} mode)",
            if sys.domain_mode == GridMode::Periodic {
                "even"
            } else {
                "odd"
            },
            sys.domain_mode
        )));
    }

    let mut h = g0;
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=cfg.max_iter {
        let next = half_log_step(&h, sys, pot)?;
        let gap = next.sup_distance(&h)?;
        h = next;
        iterations = it;
        if gap < cfg.tol {
            converged = true;
            break;
        }
    }

    let phi = h.map(f64::exp)?;
    let l_phi = ruelle_apply(&phi, sys, pot)?;
    let lambda = l_phi.eval(LAMBDA_POINT)? / phi.eval(LAMBDA_POINT)?;
    let sup_phi = phi.max_value();
    let residual = l_phi
        .values()
        .iter()
        .zip(phi.values())
        .map(|(l, p)| (l - lambda * p).abs())
        .fold(0.0, f64::max)
        / sup_phi;
    Ok(RuelleResult {
        h,
        lambda,
        residual,
        iterations,
        converged,
    })
}
