//! End-to-end tests of the command-line surface: exit codes, file emission,
//! config handling, and the documented JSON/CSV schemas.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ergopt"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("failed to launch ergopt")
}

fn read_json(path: &Path) -> serde_json::Value {
    let text =
        std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}

fn csv_column(path: &Path, col: usize) -> Vec<f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn solve_writes_files_and_reports_m() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "solve",
            "--potential",
            "sin_sq",
            "--grid-n",
            "2000",
            "--tol",
            "1e-8",
            "--max-iter",
            "500",
            "--out",
            "run",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let summary = read_json(&dir.path().join("run_summary.json"));
    let m = summary["m_estimate"].as_f64().unwrap();
    assert!((m - 0.75).abs() < 1e-3, "m = {m}");
    assert_eq!(summary["converged"], serde_json::json!(true));
    assert!(summary["residual"].as_f64().unwrap() >= 0.0);

    let csv = dir.path().join("run_solution.csv");
    let header = std::fs::read_to_string(&csv).unwrap();
    assert!(header.starts_with("x,V,realizer,R\n"));
    let v = csv_column(&csv, 1);
    assert_eq!(v.len(), 2000);
    // V is sup-normalized
    assert!(v.iter().copied().fold(f64::NEG_INFINITY, f64::max).abs() < 1e-14);
}

#[test]
fn solve_rejects_bad_iteration_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["solve", "--potential", "sin_sq", "--max-iter", "0"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("max_iter"), "stderr: {stderr}");
}

#[test]
fn solve_unknown_potential_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--potential", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn fixed_iteration_mode_reproduces_quartic_deficiency() {
    // seven iterations suffice to localize the period-2 orbit through R
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "solve",
            "--potential",
            "quartic_pair",
            "--grid-n",
            "3000",
            "--iters",
            "7",
            "--out",
            "q",
        ],
        dir.path(),
    );
    // fixed-count runs are reported as not converged
    assert_eq!(out.status.code(), Some(2));
    let csv = dir.path().join("q_solution.csv");
    let xs = csv_column(&csv, 0);
    let rs = csv_column(&csv, 3);
    for target in [1.0 / 3.0, 2.0 / 3.0] {
        let (i, _) = xs
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
            .unwrap();
        assert!(rs[i].abs() < 1e-2, "R({target}) = {}", rs[i]);
    }
    // R stays essentially nonnegative even in truncated runs
    assert!(rs.iter().all(|&r| r > -1e-6));
}

#[test]
fn compare_quadratic_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "compare",
            "--potential",
            "quadratic_third",
            "--grid-n",
            "4000",
            "--iters",
            "15",
            "--bound",
            "1e-2",
            "--out",
            "cmp",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = read_json(&dir.path().join("cmp_summary.json"));
    let sup = summary["sup_diff"].as_f64().unwrap();
    assert!(sup <= 1e-2 && sup > 0.0);
    let header = std::fs::read_to_string(dir.path().join("cmp_compare.csv")).unwrap();
    assert!(header.starts_with("x,V_numeric,V_exact,diff\n"));
}

#[test]
fn compare_without_reference_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["compare", "--potential", "octic"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reference"));
}

#[test]
fn spectrum_reports_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "spectrum",
            "--potential",
            "sin_sq",
            "--grid-n",
            "1000",
            "--tol",
            "1e-10",
            "--max-iter",
            "300",
            "--out",
            "sp",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = read_json(&dir.path().join("sp_summary.json"));
    let lambda = summary["lambda"].as_f64().unwrap();
    assert!((lambda - 3.4653).abs() < 1e-2, "lambda = {lambda}");
    let header = std::fs::read_to_string(dir.path().join("sp_spectrum.csv")).unwrap();
    assert!(header.starts_with("x,h,phi,ratio\n"));
    // ratio column is close to 1 everywhere
    let ratios = csv_column(&dir.path().join("sp_spectrum.csv"), 3);
    assert!(ratios.iter().all(|r| (r - 1.0).abs() < 1e-6));
}

#[test]
fn jsr_single_and_scan() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "jsr", "--a1", "2,1,2,2", "--a2", "2,2,1,2", "--grid-n", "2000", "--out", "j",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = read_json(&dir.path().join("j_summary.json"));
    let rho = summary["rho"].as_f64().unwrap();
    assert!((rho - 3.5616).abs() < 1e-2, "rho = {rho}");

    let out = run(
        &[
            "jsr",
            "--a1",
            "2,1,2,2",
            "--a2",
            "2,2,1,2",
            "--grid-n",
            "800",
            "--t-scan",
            "0.3:0.9:0.3",
            "--out",
            "js",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let scan = std::fs::read_to_string(dir.path().join("js_scan.csv")).unwrap();
    assert!(scan.starts_with("t,m,rho,residual,converged\n"));
    assert_eq!(scan.lines().count(), 1 + 3); // t = 0.3, 0.6, 0.9
}

#[test]
fn oracle_prints_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["oracle", "--potential", "sin_sq", "--p-max", "4"],
        dir.path(),
    );
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(json["period"], serde_json::json!(2));
    assert!((json["average"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    let points = json["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
}

#[test]
fn basins_flags_distinct_limits() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "basins",
            "--potential",
            "octic",
            "--grid-n",
            "2000",
            "--tol",
            "1e-9",
            "--max-iter",
            "2000",
            "--init",
            "zero",
            "--init",
            "bump:0.01,0.2,1",
            "--init",
            "bump:0.01,0.6667,1",
            "--out",
            "b",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let matrix = read_json(&dir.path().join("b_matrix.json"));
    assert!(matrix["distinct_pairs"].as_array().unwrap().len() >= 2);
    for i in 0..3 {
        assert!(dir.path().join(format!("b_run{i}.csv")).exists());
    }
}

#[test]
fn basins_single_init_degenerate_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "basins",
            "--potential",
            "octic",
            "--grid-n",
            "500",
            "--init",
            "zero",
            "--out",
            "one",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let matrix = read_json(&dir.path().join("one_matrix.json"));
    assert_eq!(matrix["distances"].as_array().unwrap().len(), 1);
    assert_eq!(matrix["distinct_pairs"].as_array().unwrap().len(), 0);
}

#[test]
fn config_file_drives_a_run_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.conf"),
        "# quadratic regression run\n\
         command = solve\n\
         potential = quadratic_third\n\
         grid_n = 1500\n\
         iters = 15\n\
         out = fromconf\n",
    )
    .unwrap();
    let out = run(&["solve", "--config", "run.conf"], dir.path());
    assert_eq!(out.status.code(), Some(2)); // fixed-count run
    assert!(dir.path().join("fromconf_solution.csv").exists());
    let xs = csv_column(&dir.path().join("fromconf_solution.csv"), 0);
    assert_eq!(xs.len(), 1500);

    // explicit flag beats the file
    let out = run(
        &[
            "solve", "--config", "run.conf", "--grid-n", "700", "--out", "override",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let xs = csv_column(&dir.path().join("override_solution.csv"), 0);
    assert_eq!(xs.len(), 700);

    // a config whose command disagrees with the subcommand is rejected
    let out = run(&["oracle", "--config", "run.conf"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solution_csv_round_trips_into_identical_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "solve",
            "--potential",
            "quadratic_third",
            "--grid-n",
            "900",
            "--iters",
            "10",
            "--out",
            "rt",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let csv = dir.path().join("rt_solution.csv");
    let xs = csv_column(&csv, 0);
    let vs = csv_column(&csv, 1);
    // rewrite what we parsed and parse again: float text must be stable
    let mut text = String::from("x,value\n");
    for (x, v) in xs.iter().zip(&vs) {
        text.push_str(&format!("{x},{v}\n"));
    }
    let again: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(vs, again);
}

#[test]
fn solve_matrix_potential_on_working_interval() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "solve",
            "--potential",
            "matrix_pot",
            "--params",
            "2,1,2,2,2,2,1,2,1",
            "--grid-n",
            "1500",
            "--tol",
            "1e-9",
            "--max-iter",
            "500",
            "--out",
            "mp",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = read_json(&dir.path().join("mp_summary.json"));
    let m = summary["m_estimate"].as_f64().unwrap();
    assert!((m - 1.2702).abs() < 1e-3, "m = {m}");
    // abscissae live on the working interval [1/3, 2/3]
    let xs = csv_column(&dir.path().join("mp_solution.csv"), 0);
    assert!((xs[0] - 1.0 / 3.0).abs() < 1e-12);
    assert!((xs.last().unwrap() - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn jsr_reads_matrices_from_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("jsr.conf"),
        "command = jsr\n\
         a1 = 2,1,2,2\n\
         a2 = 1,1,0.5,1\n\
         grid_n = 1200\n\
         out = fromconf\n",
    )
    .unwrap();
    let out = run(&["jsr", "--config", "jsr.conf"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = read_json(&dir.path().join("fromconf_summary.json"));
    let m = summary["m"].as_f64().unwrap();
    assert!((m - (2.0 + 2.0_f64.sqrt()).ln()).abs() < 1e-3, "m = {m}");
}

#[test]
fn compare_regressions_at_thirty_iterations() {
    // frozen regression bounds: quadratic to 1e-3 at 30 iterations, the
    // weakly expanding example to 1e-2 at 200
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "compare",
            "--potential",
            "quadratic_third",
            "--grid-n",
            "4000",
            "--iters",
            "30",
            "--bound",
            "1e-3",
            "--out",
            "q30",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(
        &[
            "compare",
            "--potential",
            "log_farey",
            "--grid-n",
            "4000",
            "--iters",
            "200",
            "--bound",
            "1e-2",
            "--out",
            "farey",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
