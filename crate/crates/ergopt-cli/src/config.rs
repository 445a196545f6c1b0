//! Argument and config-file handling.
//!
//! Every flag can also be supplied from a flat `key=value` config file
//! (`#` starts a comment, one key per line, repeated `init` lines append);
//! explicit command-line flags win over the file.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ergopt::grid::GridMode;
use ergopt::potentials::{self, Potential};
use ergopt::solver::SolverConfig;
use ergopt::systems::{BranchSystem, Matrix2};
use std::collections::HashMap;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "ergopt",
    about = "Calibrated subactions, maximal ergodic values, transfer-operator eigenpairs and joint spectral radii on [0,1]",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Iterate the averaged Bellman map to a calibrated subaction; writes
    /// x,V,realizer,R plot data and a JSON summary.
    Solve(RunArgs),
    /// Solve, then compare against the analytic reference for the potential.
    Compare(CompareArgs),
    /// Principal eigenpair of the transfer operator via the log-domain
    /// iteration.
    Spectrum(RunArgs),
    /// Joint spectral radius of a 2x2 matrix pair, single scale or scan.
    Jsr(JsrArgs),
    /// Best periodic-orbit certificate (brute-force lower bound for m).
    Oracle(OracleArgs),
    /// Solve from several initial conditions and report pairwise distances
    /// between the limits.
    Basins(RunArgs),
}

#[derive(Args, Clone, Default)]
pub struct RunArgs {
    /// Catalog potential name.
    #[arg(long)]
    pub potential: Option<String>,
    /// Potential parameters, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<f64>>,
    /// Dynamical system: doubling | farey | mobius (default inferred from
    /// the potential).
    #[arg(long)]
    pub system: Option<String>,
    /// Grid resolution.
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Sup-norm convergence tolerance on consecutive iterates.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration budget.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Run exactly this many iterations (fixed-count mode).
    #[arg(long)]
    pub iters: Option<usize>,
    /// Initial condition: zero | bump:EPS,CENTER,SLOPE (repeatable for
    /// basins).
    #[arg(long)]
    pub init: Vec<String>,
    /// Output path prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key=value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Acceptance bound on the sup difference; exit 0 iff the comparison
    /// stays below it.
    #[arg(long)]
    pub bound: Option<f64>,
}

#[derive(Args)]
pub struct JsrArgs {
    /// First matrix, row-major a,b,c,d.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a1: Option<Vec<f64>>,
    /// Second matrix, row-major a,b,c,d.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a2: Option<Vec<f64>>,
    /// Single scale for the second matrix.
    #[arg(long)]
    pub t: Option<f64>,
    /// Scan specification lo:hi:step.
    #[arg(long)]
    pub t_scan: Option<String>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<f64>>,
    #[arg(long)]
    pub system: Option<String>,
    /// Largest period to enumerate.
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parsed config file: key -> values in file order.
pub struct FileConfig(HashMap<String, Vec<String>>);

impl FileConfig {
    pub fn load(path: Option<&Path>, expected_command: &str) -> Result<Self> {
        let mut map: HashMap<String, Vec<String>> = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("config file {}", path.display()))?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    bail!(
                        "config line {}: expected key=value, got {raw:?}",
                        lineno + 1
                    );
                };
                map.entry(key.trim().to_string())
                    .or_default()
                    .push(value.trim().to_string());
            }
            if let Some(cmds) = map.get("command") {
                if let Some(cmd) = cmds.first() {
                    if cmd != expected_command {
                        bail!(
                            "config field command={cmd} does not match the invoked subcommand {expected_command}"
                        );
                    }
                }
            }
        }
        Ok(Self(map))
    }

    pub fn one(&self, key: &str) -> Option<&str> {
        self.0.get(key).and_then(|v| v.first()).map(String::as_str)
    }

    pub fn all(&self, key: &str) -> &[String] {
        self.0.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn parse_one<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.one(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e| anyhow!("config field {key}: {e}")),
        }
    }
}

/// Initial-condition specification.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Zero,
    Bump { eps: f64, center: f64, slope: f64 },
}

impl InitSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "zero" {
            return Ok(InitSpec::Zero);
        }
        if let Some(rest) = s.strip_prefix("bump:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 3 {
                bail!("init field: bump takes three numbers eps,center,slope, got {s:?}");
            }
            let nums: Vec<f64> = parts
                .iter()
                .map(|p| p.trim().parse().map_err(|e| anyhow!("init field: {e}")))
                .collect::<Result<_>>()?;
            return Ok(InitSpec::Bump {
                eps: nums[0],
                center: nums[1],
                slope: nums[2],
            });
        }
        bail!("init field: expected 'zero' or 'bump:eps,center,slope', got {s:?}")
    }

    pub fn label(&self) -> String {
        match self {
            InitSpec::Zero => "zero".into(),
            InitSpec::Bump { eps, center, slope } => format!("bump({eps},{center},{slope})"),
        }
    }
}

/// Fully resolved inputs for solve-like commands.
pub struct ResolvedRun {
    pub potential: Potential,
    pub system: BranchSystem,
    pub cfg: SolverConfig,
    pub inits: Vec<InitSpec>,
    pub out: PathBuf,
    pub potential_params: Vec<f64>,
}

pub fn resolve_run(args: &RunArgs, command: &str) -> Result<ResolvedRun> {
    let file = FileConfig::load(args.config.as_deref(), command)?;

    let potential_name = args
        .potential
        .clone()
        .or_else(|| file.one("potential").map(String::from))
        .ok_or_else(|| anyhow!("missing field: potential"))?;
    let params: Vec<f64> = match &args.params {
        Some(p) => p.clone(),
        None => match file.one("params") {
            Some(s) => parse_float_list(s).context("config field params")?,
            None => Vec::new(),
        },
    };
    let potential = potentials::catalog(&potential_name, &params)?;

    let system_name = args
        .system
        .clone()
        .or_else(|| file.one("system").map(String::from));
    let system = build_system(system_name.as_deref(), &potential_name, &params, &potential)?;

    let mut cfg = SolverConfig {
        grid_n: args
            .grid_n
            .or(file.parse_one("grid_n")?)
            .unwrap_or(ergopt::grid::DEFAULT_RESOLUTION),
        tol: args.tol.or(file.parse_one("tol")?).unwrap_or(1e-9),
        max_iter: args
            .max_iter
            .or(file.parse_one("max_iter")?)
            .unwrap_or(2000),
        ..SolverConfig::default()
    };
    if let Some(iters) = args.iters.or(file.parse_one("iters")?) {
        if iters == 0 {
            bail!("invalid field iters: must be at least 1");
        }
        cfg.max_iter = iters;
        cfg.tol = 1e-300; // fixed-count mode: the gap test never fires
    }

    let mut inits: Vec<InitSpec> = Vec::new();
    for s in &args.init {
        inits.push(InitSpec::parse(s)?);
    }
    if inits.is_empty() {
        for s in file.all("init") {
            inits.push(InitSpec::parse(s)?);
        }
    }
    if inits.is_empty() {
        inits.push(InitSpec::Zero);
    }

    let out = args
        .out
        .clone()
        .or_else(|| file.one("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("ergopt_{command}")));

    Ok(ResolvedRun {
        potential,
        system,
        cfg,
        inits,
        out,
        potential_params: params,
    })
}

pub fn parse_float_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| anyhow!("{e}: {p:?}")))
        .collect()
}

fn build_system(
    name: Option<&str>,
    potential_name: &str,
    params: &[f64],
    potential: &Potential,
) -> Result<BranchSystem> {
    let inferred = match potential_name {
        "log_farey" | "neg_log_farey" => "farey",
        "matrix_pot" => "mobius",
        _ => "doubling",
    };
    let name = name.unwrap_or(inferred);
    match name {
        "doubling" => Ok(BranchSystem::doubling(potential.domain_mode)),
        "farey" => Ok(BranchSystem::farey_like()),
        "mobius" => {
            if potential_name == "matrix_pot" && params.len() == 9 {
                let a1 = Matrix2::new(params[0], params[1], params[2], params[3]);
                let a2 = Matrix2::new(params[4], params[5], params[6], params[7]);
                Ok(BranchSystem::mobius(a1, a2)?)
            } else {
                bail!("system mobius needs the matrix_pot potential with 9 params")
            }
        }
        other => bail!("invalid field system: unknown system {other:?}"),
    }
}

/// Build the initial grid function for a resolved run.
pub fn build_initial(
    spec: &InitSpec,
    system: &BranchSystem,
    grid_n: usize,
) -> Result<ergopt::GridFunction> {
    let (lo, hi) = system.working_interval;
    match spec {
        InitSpec::Zero => Ok(match system.domain_mode {
            GridMode::Periodic => ergopt::GridFunction::zeros(grid_n, GridMode::Periodic)?,
            GridMode::Interval => ergopt::GridFunction::zeros_on(grid_n, lo, hi)?,
        }),
        InitSpec::Bump { eps, center, slope } => {
            if system.is_ifs_only() {
                bail!("bump initial conditions are only supported on full-interval systems");
            }
            Ok(ergopt::solver::bump_initial(
                *eps,
                *center,
                *slope,
                grid_n,
                system.domain_mode,
            )?)
        }
    }
}
