//! CSV plot data and JSON run summaries.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! CSV re-parses to bit-identical values; all JSON summaries are flat
//! objects.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridMode};
use crate::jsr::JsrResult;
use crate::ruelle::RuelleResult;
use crate::solver::SubactionResult;
use std::io::{BufRead, Write};

/// Two-column `x,value` dump of a grid function.
pub fn write_grid_csv<W: Write>(w: &mut W, gf: &GridFunction) -> Result<()> {
    writeln!(w, "x,value")?;
    for (i, x) in gf.nodes().enumerate() {
        writeln!(w, "{},{}", x, gf.values()[i])?;
    }
    Ok(())
}

/// Reads a two-column `x,value` CSV back into a grid function. Interval
/// grids recover their domain from the first and last abscissae.
pub fn read_grid_csv<R: BufRead>(r: R, mode: GridMode) -> Result<GridFunction> {
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with('x')) {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(xs_str), Some(v_str)) = (parts.next(), parts.next()) else {
            return Err(Error::Parse(format!(
                "line {}: expected x,value",
                lineno + 1
            )));
        };
        let x: f64 = xs_str
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        let v: f64 = v_str
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        xs.push(x);
        values.push(v);
    }
    if xs.len() < 2 {
        return Err(Error::Parse("need at least two samples".into()));
    }
    match mode {
        GridMode::Periodic => GridFunction::from_values(values, GridMode::Periodic),
        GridMode::Interval => {
            let lo = xs[0];
            let hi = *xs.last().unwrap();
            if lo == 0.0 && hi == 1.0 {
                GridFunction::from_values(values, GridMode::Interval)
            } else {
                GridFunction::from_values_on(values, lo, hi)
            }
        }
    }
}

/// `x,V,realizer,R` rows for a solver result.
pub fn write_solve_csv<W: Write>(w: &mut W, res: &SubactionResult) -> Result<()> {
    writeln!(w, "x,V,realizer,R")?;
    for (i, x) in res.v.nodes().enumerate() {
        writeln!(
            w,
            "{},{},{},{}",
            x,
            res.v.values()[i],
            res.realizer[i],
            res.r.values()[i]
        )?;
    }
    Ok(())
}

pub fn solve_summary(res: &SubactionResult) -> serde_json::Value {
    serde_json::json!({
        "m_estimate": res.m_estimate,
        "iterations": res.iterations,
        "residual": res.residual,
        "converged": res.converged,
    })
}

/// `x,V_numeric,V_exact,diff` rows; the two inputs must share a grid.
pub fn write_compare_csv<W: Write>(
    w: &mut W,
    numeric: &GridFunction,
    exact: &GridFunction,
) -> Result<f64> {
    let diff = numeric.zip_map(exact, |a, b| a - b)?;
    writeln!(w, "x,V_numeric,V_exact,diff")?;
    let mut sup = 0.0_f64;
    for (i, x) in numeric.nodes().enumerate() {
        let d = diff.values()[i];
        sup = sup.max(d.abs());
        writeln!(
            w,
            "{},{},{},{}",
            x,
            numeric.values()[i],
            exact.values()[i],
            d
        )?;
    }
    Ok(sup)
}

/// `x,h,phi,ratio` rows for a transfer-operator eigenpair, where `ratio` is
/// `L_A(phi) / (lambda phi)`, identically 1 for an exact eigenfunction.
pub fn write_spectrum_csv<W: Write>(
    w: &mut W,
    res: &RuelleResult,
    l_phi: &GridFunction,
) -> Result<()> {
    writeln!(w, "x,h,phi,ratio")?;
    for (i, x) in res.h.nodes().enumerate() {
        let phi = res.h.values()[i].exp();
        let ratio = l_phi.values()[i] / (res.lambda * phi);
        writeln!(w, "{},{},{},{}", x, res.h.values()[i], phi, ratio)?;
    }
    Ok(())
}

pub fn spectrum_summary(res: &RuelleResult) -> serde_json::Value {
    serde_json::json!({
        "lambda": res.lambda,
        "residual": res.residual,
        "iterations": res.iterations,
    })
}

/// `t,m,rho,residual,converged` rows for a parameter scan; failed points are
/// written with empty value fields.
pub fn write_jsr_scan_csv<W: Write>(w: &mut W, rows: &[(f64, Result<JsrResult>)]) -> Result<()> {
    writeln!(w, "t,m,rho,residual,converged")?;
    for (t, r) in rows {
        match r {
            Ok(res) => writeln!(
                w,
                "{},{},{},{},{}",
                t, res.m, res.rho, res.subaction.residual, res.subaction.converged
            )?,
            Err(_) => writeln!(w, "{t},,,,false")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_csv_round_trip_bit_exact() {
        for mode in [GridMode::Periodic, GridMode::Interval] {
            let gf = GridFunction::sample(257, mode, |x| (13.7 * x).sin() / 3.0 - x).unwrap();
            let mut buf = Vec::new();
            write_grid_csv(&mut buf, &gf).unwrap();
            let back = read_grid_csv(&buf[..], mode).unwrap();
            assert_eq!(gf.values(), back.values());
            assert_eq!(gf.mode(), back.mode());
        }
    }

    #[test]
    fn restricted_grid_round_trip() {
        let gf = GridFunction::sample_on(101, GridMode::Interval, 1.0 / 3.0, 2.0 / 3.0, |x| x * x)
            .unwrap();
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &gf).unwrap();
        let back = read_grid_csv(&buf[..], GridMode::Interval).unwrap();
        assert_eq!(gf.values(), back.values());
        assert_eq!(gf.domain(), back.domain());
    }

    #[test]
    fn malformed_csv_is_a_parse_error() {
        let data = b"x,value\n0.0\n" as &[u8];
        assert!(matches!(
            read_grid_csv(data, GridMode::Interval),
            Err(Error::Parse(_))
        ));
    }
}
