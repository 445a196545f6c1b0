//! Joint-spectral-radius estimation for a pair of 2x2 matrices.
//!
//! The pair `(A_1, A_2)` induces a Moebius iterated function system and a
//! potential whose maximal ergodic value `m` satisfies `rho(A_1, A_2) = e^m`
//! under the ergodic-optimization reduction. Scaling `A_2` by `t > 0` leaves
//! the branches unchanged and only shifts the second potential piece by
//! `log t^2`, so a parameter scan reuses one system.

use crate::error::Result;
use crate::grid::GridFunction;
use crate::potentials::matrix_potential;
use crate::solver::{solve, SolverConfig, SubactionResult};
use crate::systems::{BranchSystem, Matrix2};

#[derive(Debug, Clone)]
pub struct JsrResult {
    /// Estimated joint spectral radius `e^m`.
    pub rho: f64,
    /// Estimated maximal ergodic value of the induced potential.
    pub m: f64,
    pub subaction: SubactionResult,
    /// Scale applied to the second matrix, when part of a scan.
    pub t: Option<f64>,
    /// Set when the matrices fail the nonnegativity spot-check under which
    /// the reduction is stated.
    pub note: Option<String>,
}

fn positivity_note(a1: &Matrix2, a2: &Matrix2) -> Option<String> {
    let entries = [a1.a, a1.b, a1.c, a1.d, a2.a, a2.b, a2.c, a2.d];
    if entries.iter().any(|&e| e < 0.0) {
        Some("matrix entries are not all nonnegative; the spectral-radius identification is unverified".into())
    } else {
        None
    }
}

/// Estimates `rho(A_1, t A_2)` by solving the induced subaction problem on
/// the working interval.
pub fn joint_spectral_radius_scaled(
    a1: Matrix2,
    a2: Matrix2,
    t: Option<f64>,
    cfg: &SolverConfig,
) -> Result<JsrResult> {
    let sys = BranchSystem::mobius(a1, a2)?;
    let pot = matrix_potential(a1, a2, t.unwrap_or(1.0))?;
    let (lo, hi) = sys.working_interval;
    let f0 = GridFunction::zeros_on(cfg.grid_n, lo, hi)?;
    let subaction = solve(&sys, &pot, &f0, cfg)?;
    let m = subaction.m_estimate;
    Ok(JsrResult {
        rho: m.exp(),
        m,
        subaction,
        t,
        note: positivity_note(&a1, &a2),
    })
}

/// `rho(A_1, A_2)` at unit scale.
pub fn joint_spectral_radius(a1: Matrix2, a2: Matrix2, cfg: &SolverConfig) -> Result<JsrResult> {
    joint_spectral_radius_scaled(a1, a2, None, cfg)
}

/// One solve per scale value; per-point failures are recorded and the scan
/// continues.
pub fn t_scan(
    a1: Matrix2,
    a2: Matrix2,
    t_values: &[f64],
    cfg: &SolverConfig,
) -> Vec<(f64, Result<JsrResult>)> {
    t_values
        .iter()
        .map(|&t| (t, joint_spectral_radius_scaled(a1, a2, Some(t), cfg)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig {
            grid_n: 2000,
            tol: 1e-10,
            max_iter: 400,
            ..Default::default()
        }
    }

    fn example_matrices() -> (Matrix2, Matrix2) {
        (
            Matrix2::new(2.0, 1.0, 2.0, 2.0),
            Matrix2::new(2.0, 2.0, 1.0, 2.0),
        )
    }

    #[test]
    fn first_example_radius() {
        let (a1, a2) = example_matrices();
        let r = joint_spectral_radius(a1, a2, &cfg()).unwrap();
        let exact = (3.0 + 17.0_f64.sqrt()) / 2.0;
        assert!(r.subaction.converged);
        assert!((r.rho - exact).abs() < 1e-2, "rho = {}", r.rho);
        assert!(r.note.is_none());
    }

    #[test]
    fn identical_matrices_give_spectral_radius() {
        let a = Matrix2::new(2.0, 1.0, 2.0, 2.0);
        let r = joint_spectral_radius(a, a, &cfg()).unwrap();
        assert!(
            (r.rho - a.spectral_radius()).abs() < 1e-2,
            "rho = {}",
            r.rho
        );
    }

    #[test]
    fn scan_records_per_point_results() {
        let (a1, a2) = example_matrices();
        let small = SolverConfig {
            grid_n: 400,
            tol: 1e-9,
            max_iter: 200,
            ..Default::default()
        };
        let out = t_scan(a1, a2, &[0.5, 1.0], &small);
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|(_, r)| r.is_ok()));
        let m0 = out[0].1.as_ref().unwrap().m;
        assert!((m0 - (2.0 + 2.0_f64.sqrt()).ln()).abs() < 2e-3, "m = {m0}");
    }

    #[test]
    fn negative_entries_noted() {
        let a1 = Matrix2::new(2.0, 1.0, 2.0, 2.0);
        let a2 = Matrix2::new(2.0, 2.0, -0.1, 2.0);
        if let Ok(r) = joint_spectral_radius(a1, a2, &cfg()) {
            assert!(r.note.is_some());
        }
    }
}
