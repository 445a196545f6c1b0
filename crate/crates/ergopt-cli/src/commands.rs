use crate::config::{
    build_initial, parse_float_list, resolve_run, Cli, Command, CompareArgs, FileConfig, InitSpec,
    JsrArgs, OracleArgs, RunArgs,
};
use crate::{EXIT_NOT_CONVERGED, EXIT_OK};
use anyhow::{anyhow, bail, Context, Result};
use ergopt::grid::GridMode;
use ergopt::reference;
use ergopt::solver::{solve, SubactionResult};
use ergopt::systems::Matrix2;
use ergopt::{io, jsr, oracle, ruelle, GridFunction};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Jsr(args) => cmd_jsr(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Basins(args) => cmd_basins(args),
    }
}

fn out_path(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "ergopt".into());
    name.push('_');
    name.push_str(suffix);
    prefix.with_file_name(name)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn cmd_solve(args: RunArgs) -> Result<u8> {
    let run = resolve_run(&args, "solve")?;
    let f0 = build_initial(&run.inits[0], &run.system, run.cfg.grid_n)?;
    let res = solve(&run.system, &run.potential, &f0, &run.cfg)?;

    let csv_path = out_path(&run.out, "solution.csv");
    let mut w = BufWriter::new(File::create(&csv_path)?);
    io::write_solve_csv(&mut w, &res)?;
    let json_path = out_path(&run.out, "summary.json");
    write_json(&json_path, &io::solve_summary(&res))?;

    println!(
        "{}: m_estimate = {:.10}, {} iterations, residual {:.3e}, converged = {}",
        run.potential.name(),
        res.m_estimate,
        res.iterations,
        res.residual,
        res.converged
    );
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(if res.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

/// Analytic reference for a catalog potential, when one exists.
/// The boolean marks CONJECTURAL references (numerically probed candidates
/// with no proof behind them).
#[allow(clippy::type_complexity)]
fn reference_for(name: &str, params: &[f64]) -> Option<(Box<dyn Fn(f64) -> f64>, bool)> {
    match name {
        "quadratic_third" => Some((Box::new(|x| reference::quadratic_exact(x).0), false)),
        "sin_sq" => Some((Box::new(|x| reference::sinsq_assembled(x, 30)), false)),
        "sin" => Some((Box::new(|x| reference::sin_assembled(x, 20)), false)),
        "log_farey" => Some((Box::new(reference::farey_exact), false)),
        "self_subaction" => {
            let pot = ergopt::potentials::self_subaction_potential(params[0], params[1]).ok()?;
            Some((Box::new(move |x| pot.eval(x).unwrap()), false))
        }
        "matrix_pot" => {
            let first_example = [2.0, 1.0, 2.0, 2.0, 2.0, 2.0, 1.0, 2.0];
            if params.len() != 9
                || params[..8]
                    .iter()
                    .zip(first_example)
                    .any(|(a, b)| (a - b).abs() > 1e-12)
            {
                return None;
            }
            let t = params[8];
            if (t - 1.0).abs() <= 1e-12 {
                Some((Box::new(reference::jsr_exact_example1), false))
            } else if reference::jsr_exact_parametric(0.5, t).is_ok() {
                Some((
                    Box::new(move |x| reference::jsr_exact_parametric(x, t).unwrap().0),
                    false,
                ))
            } else {
                None
            }
        }
        "cantor_dist" => Some((
            Box::new(|x| {
                reference::cantor_conjecture_assembled(x, reference::CantorSeries::G, 40).unwrap()
            }),
            true,
        )),
        _ => None,
    }
}

fn cmd_compare(args: CompareArgs) -> Result<u8> {
    let file = FileConfig::load(args.run.config.as_deref(), "compare")?;
    let bound = args.bound.or(file.parse_one("bound")?).unwrap_or(1e-2);
    let run = resolve_run(&args.run, "compare")?;

    let (reference, conjectural) = reference_for(run.potential.name(), &run.potential_params)
        .ok_or_else(|| {
            anyhow!(
                "no analytic reference available for potential {:?}",
                run.potential.name()
            )
        })?;
    if conjectural {
        eprintln!(
            "note: the reference for {:?} is CONJECTURAL; treat the comparison as a probe, not a certificate",
            run.potential.name()
        );
    }

    let f0 = build_initial(&run.inits[0], &run.system, run.cfg.grid_n)?;
    let res = solve(&run.system, &run.potential, &f0, &run.cfg)?;

    let exact_raw = sample_on_grid(&res.v, &reference)?;
    let (exact, _) = exact_raw.sup_normalize();
    let csv_path = out_path(&run.out, "compare.csv");
    let mut w = BufWriter::new(File::create(&csv_path)?);
    let sup_diff = io::write_compare_csv(&mut w, &res.v, &exact)?;
    let json_path = out_path(&run.out, "summary.json");
    write_json(&json_path, &serde_json::json!({ "sup_diff": sup_diff }))?;

    println!(
        "{}: sup_diff = {:.3e} (bound {:.3e}), m_estimate = {:.10}",
        run.potential.name(),
        sup_diff,
        bound,
        res.m_estimate
    );
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(if sup_diff <= bound {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn sample_on_grid(template: &GridFunction, f: &dyn Fn(f64) -> f64) -> Result<GridFunction> {
    let n = template.resolution();
    let (lo, hi) = template.domain();
    Ok(match template.mode() {
        GridMode::Periodic => GridFunction::sample(n, GridMode::Periodic, f)?,
        GridMode::Interval => GridFunction::sample_on(n, GridMode::Interval, lo, hi, f)?,
    })
}

fn cmd_spectrum(args: RunArgs) -> Result<u8> {
    let grid_n_explicit = args.grid_n.is_some()
        || FileConfig::load(args.config.as_deref(), "spectrum")?
            .one("grid_n")
            .is_some();
    let mut run = resolve_run(&args, "spectrum")?;
    // 0.5 must be a node: even n on periodic grids, odd n on interval grids
    if !grid_n_explicit && run.system.domain_mode == GridMode::Interval && run.cfg.grid_n % 2 == 0 {
        run.cfg.grid_n += 1;
    }
    let res = ruelle::eigen_solve(&run.system, &run.potential, &run.cfg)?;

    let phi = res.h.map(f64::exp)?;
    let l_phi = ruelle::ruelle_apply(&phi, &run.system, &run.potential)?;
    let csv_path = out_path(&run.out, "spectrum.csv");
    let mut w = BufWriter::new(File::create(&csv_path)?);
    io::write_spectrum_csv(&mut w, &res, &l_phi)?;
    let json_path = out_path(&run.out, "summary.json");
    write_json(&json_path, &io::spectrum_summary(&res))?;

    println!(
        "{}: lambda = {:.8}, residual {:.3e}, {} iterations, converged = {}",
        run.potential.name(),
        res.lambda,
        res.residual,
        res.iterations,
        res.converged
    );
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(if res.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn parse_matrix(values: Option<Vec<f64>>, file: &FileConfig, key: &str) -> Result<Matrix2> {
    let vals = match values {
        Some(v) => v,
        None => match file.one(key) {
            Some(s) => parse_float_list(s).with_context(|| format!("config field {key}"))?,
            None => bail!("missing field: {key} (four reals a,b,c,d)"),
        },
    };
    if vals.len() != 4 {
        bail!("invalid field {key}: need four reals, got {}", vals.len());
    }
    Ok(Matrix2::new(vals[0], vals[1], vals[2], vals[3]))
}

fn parse_scan(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("invalid field t_scan: expected lo:hi:step, got {spec:?}");
    }
    let lo: f64 = parts[0].parse().map_err(|e| anyhow!("t_scan lo: {e}"))?;
    let hi: f64 = parts[1].parse().map_err(|e| anyhow!("t_scan hi: {e}"))?;
    let step: f64 = parts[2].parse().map_err(|e| anyhow!("t_scan step: {e}"))?;
    if step.is_nan() || step <= 0.0 || hi < lo {
        bail!("invalid field t_scan: need step > 0 and hi >= lo");
    }
    let mut ts = Vec::new();
    let n = ((hi - lo) / step).round() as usize;
    for i in 0..=n {
        let t = lo + i as f64 * step;
        if t <= hi + 1e-12 {
            ts.push(t);
        }
    }
    Ok(ts)
}

fn cmd_jsr(args: JsrArgs) -> Result<u8> {
    let file = FileConfig::load(args.config.as_deref(), "jsr")?;
    let a1 = parse_matrix(args.a1, &file, "a1")?;
    let a2 = parse_matrix(args.a2, &file, "a2")?;
    let cfg = ergopt::SolverConfig {
        grid_n: args
            .grid_n
            .or(file.parse_one("grid_n")?)
            .unwrap_or(ergopt::grid::DEFAULT_RESOLUTION),
        tol: args.tol.or(file.parse_one("tol")?).unwrap_or(1e-9),
        max_iter: args
            .max_iter
            .or(file.parse_one("max_iter")?)
            .unwrap_or(2000),
        ..Default::default()
    };
    let out = args
        .out
        .or_else(|| file.one("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("ergopt_jsr"));
    let scan_spec = args.t_scan.or_else(|| file.one("t_scan").map(String::from));

    if let Some(spec) = scan_spec {
        let ts = parse_scan(&spec)?;
        let rows = jsr::t_scan(a1, a2, &ts, &cfg);
        let csv_path = out_path(&out, "scan.csv");
        let mut w = BufWriter::new(File::create(&csv_path)?);
        io::write_jsr_scan_csv(&mut w, &rows)?;
        let mut all_converged = true;
        for (t, r) in &rows {
            match r {
                Ok(res) => {
                    all_converged &= res.subaction.converged;
                    println!("t = {t:.6}: m = {:.8}, rho = {:.8}", res.m, res.rho);
                }
                Err(e) => {
                    all_converged = false;
                    println!("t = {t:.6}: failed ({e})");
                }
            }
        }
        println!("wrote {}", csv_path.display());
        return Ok(if all_converged {
            EXIT_OK
        } else {
            EXIT_NOT_CONVERGED
        });
    }

    let t = args.t.or(file.parse_one("t")?);
    let res = jsr::joint_spectral_radius_scaled(a1, a2, t, &cfg)?;
    let csv_path = out_path(&out, "solution.csv");
    let mut w = BufWriter::new(File::create(&csv_path)?);
    io::write_solve_csv(&mut w, &res.subaction)?;
    let json_path = out_path(&out, "summary.json");
    write_json(
        &json_path,
        &serde_json::json!({
            "m": res.m,
            "rho": res.rho,
            "t": res.t,
            "residual": res.subaction.residual,
            "iterations": res.subaction.iterations,
            "converged": res.subaction.converged,
            "note": res.note,
        }),
    )?;
    if let Some(note) = &res.note {
        eprintln!("note: {note}");
    }
    println!(
        "rho = {:.8} (m = {:.8}), {} iterations, converged = {}",
        res.rho, res.m, res.subaction.iterations, res.subaction.converged
    );
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(if res.subaction.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn cmd_oracle(args: OracleArgs) -> Result<u8> {
    let run_args = RunArgs {
        potential: args.potential,
        params: args.params,
        system: args.system,
        config: args.config.clone(),
        ..Default::default()
    };
    let file = FileConfig::load(args.config.as_deref(), "oracle")?;
    let p_max = args.p_max.or(file.parse_one("p_max")?).unwrap_or(8);
    let run = resolve_run(&run_args, "oracle")?;
    let cert = oracle::best_periodic_value(&run.potential, &run.system, p_max)?;
    let json = serde_json::json!({
        "period": cert.period,
        "points": cert.points,
        "word": cert.word,
        "average": cert.birkhoff_average,
    });
    println!("{}", serde_json::to_string_pretty(&json)?);
    if args.out.is_some() || file.one("out").is_some() {
        let out = args
            .out
            .or_else(|| file.one("out").map(PathBuf::from))
            .unwrap();
        write_json(&out_path(&out, "certificate.json"), &json)?;
    }
    Ok(EXIT_OK)
}

fn cmd_basins(args: RunArgs) -> Result<u8> {
    let run = resolve_run(&args, "basins")?;
    if run.inits.is_empty() {
        bail!("missing field: init (give at least one initial condition)");
    }
    let mut results: Vec<(InitSpec, SubactionResult)> = Vec::new();
    for spec in &run.inits {
        let f0 = build_initial(spec, &run.system, run.cfg.grid_n)?;
        let res = solve(&run.system, &run.potential, &f0, &run.cfg)?;
        results.push((spec.clone(), res));
    }

    for (i, (spec, res)) in results.iter().enumerate() {
        let csv_path = out_path(&run.out, &format!("run{i}.csv"));
        let mut w = BufWriter::new(File::create(&csv_path)?);
        io::write_solve_csv(&mut w, res)?;
        println!(
            "init {} ({}): m_estimate = {:.10}, converged = {}",
            i,
            spec.label(),
            res.m_estimate,
            res.converged
        );
    }

    let k = results.len();
    let threshold = 10.0 * run.cfg.tol;
    let mut distances = vec![vec![0.0; k]; k];
    let mut distinct_pairs = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let d = results[i].1.v.sup_distance(&results[j].1.v)?;
            distances[i][j] = d;
            distances[j][i] = d;
            if d > threshold {
                distinct_pairs.push([i, j]);
            }
        }
    }
    let json = serde_json::json!({
        "labels": results.iter().map(|(s, _)| s.label()).collect::<Vec<_>>(),
        "distances": distances,
        "distinct_pairs": distinct_pairs,
        "threshold": threshold,
    });
    let json_path = out_path(&run.out, "matrix.json");
    write_json(&json_path, &json)?;
    println!(
        "{} distinct limit pair(s) at threshold {:.3e}; wrote {}",
        json["distinct_pairs"].as_array().unwrap().len(),
        threshold,
        json_path.display()
    );
    let all_converged = results.iter().all(|(_, r)| r.converged);
    Ok(if all_converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}
