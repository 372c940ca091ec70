use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qmetric::curvature::scalar_curvature;
use qmetric::divergence::{bures_distance, h_g_divergence, hessian_check, lookup_g, DEFAULT_HESSIAN_STEP};
use qmetric::geometry::{bhattacharyya_distance, wy_distance, wy_geodesic, ProbabilityVector};
use qmetric::monotone::{lookup, metric_eval};
use qmetric::spectral::{DensityMatrix, MatrixJson, TangentVector};
use qmetric::verify::{run_suite, Suite, SuiteConfig};

/// Monotone metrics on quantum state space, centred on the Wigner-Yanase information.
#[derive(Parser, Debug)]
#[command(name = "qmetric", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print JSON instead of a bare number.
    #[arg(long, global = true)]
    json: bool,
    /// Override a check tolerance, e.g. `--tolerance hessian=1e-5`.
    #[arg(long = "tolerance", global = true, value_name = "NAME=VALUE", value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance between two states.
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = DistanceMetric::Wy)]
        metric: DistanceMetric,
    },
    /// Samples of the WY geodesic between two states.
    Geodesic {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 11)]
        samples: usize,
    },
    /// Scalar curvature of a monotone metric at a state.
    Curvature {
        rho: PathBuf,
        /// Operator monotone function id.
        #[arg(long = "f", default_value = "wy")]
        f: String,
    },
    /// Monotone metric ⟨A, B⟩ at a state.
    MetricEval {
        rho: PathBuf,
        a: PathBuf,
        b: PathBuf,
        #[arg(long = "f", default_value = "wy")]
        f: String,
    },
    /// Relative g-entropy H_g(ρ, σ).
    Divergence {
        rho: PathBuf,
        sigma: PathBuf,
        #[arg(long = "g", default_value = "wy")]
        g: String,
    },
    /// Finite-difference Hessian of H_g against the induced metric.
    Hessian {
        rho: PathBuf,
        a: PathBuf,
        b: PathBuf,
        #[arg(long = "g", default_value = "wy")]
        g: String,
        #[arg(long, default_value_t = DEFAULT_HESSIAN_STEP)]
        step: f64,
    },
    /// Run a seeded verification suite.
    Verify {
        /// One of the suite names, or `all`.
        suite: String,
        /// Dimensions, comma separated.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        /// Trials per dimension.
        #[arg(long)]
        trials: Option<usize>,
        /// Include wall-clock time (output is then no longer reproducible).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DistanceMetric {
    Wy,
    Bures,
    Bhattacharyya,
}

impl fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceMetric::Wy => "wy",
            DistanceMetric::Bures => "bures",
            DistanceMetric::Bhattacharyya => "bhattacharyya",
        })
    }
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = value
        .parse()
        .map_err(|_| format!("tolerance `{name}` has a non-numeric value `{value}`"))?;
    Ok((name.to_string(), v))
}

/// Failure modes that map onto exit codes.
enum Failure {
    /// Bad input or arguments (exit 2).
    Usage(String),
    /// A verification ran and did not pass (exit 1).
    Verification,
}

impl From<qmetric::Error> for Failure {
    fn from(e: qmetric::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_matrix(path: &Path) -> CliResult<MatrixJson> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    MatrixJson::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_density(path: &Path) -> CliResult<DensityMatrix> {
    read_matrix(path)?
        .to_density()
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_tangent(path: &Path) -> CliResult<TangentVector> {
    read_matrix(path)?
        .to_tangent()
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// `v` with 15 significant digits.
fn sig15(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.14e}")
    }
}

fn emit_json<T: Serialize>(value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn diagonal_probabilities(path: &Path, m: &MatrixJson) -> CliResult<ProbabilityVector> {
    let off_diagonal = (0..m.n)
        .flat_map(|i| (0..m.n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| m.re[i][j].hypot(m.im[i][j]))
        .fold(0.0_f64, f64::max);
    if off_diagonal > 1e-12 {
        return Err(Failure::Usage(format!(
            "{}: bhattacharyya needs a diagonal matrix (largest off-diagonal entry {off_diagonal:e})",
            path.display()
        )));
    }
    ProbabilityVector::new((0..m.n).map(|i| m.re[i][i]).collect())
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn scalar_output(json: bool, value: f64, fields: serde_json::Value) -> CliResult<()> {
    if json {
        let mut obj = fields;
        obj["value"] = serde_json::json!(value);
        emit_json(&obj)
    } else {
        println!("{}", sig15(value));
        Ok(())
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let g = cli.global;
    match cli.command {
        Command::Distance { a, b, metric } => {
            let value = match metric {
                DistanceMetric::Wy => wy_distance(&read_density(&a)?, &read_density(&b)?)?,
                DistanceMetric::Bures => bures_distance(&read_density(&a)?, &read_density(&b)?)?,
                DistanceMetric::Bhattacharyya => {
                    let p = diagonal_probabilities(&a, &read_matrix(&a)?)?;
                    let q = diagonal_probabilities(&b, &read_matrix(&b)?)?;
                    bhattacharyya_distance(&p, &q)?
                }
            };
            let fields = serde_json::json!({
                "metric": metric.to_string(),
                "inputs": [path_str(&a), path_str(&b)],
            });
            scalar_output(g.json, value, fields)
        }
        Command::Geodesic { a, b, samples } => {
            if samples < 2 {
                return Err(Failure::Usage(format!(
                    "--samples must be at least 2, got {samples}"
                )));
            }
            let path = wy_geodesic(&read_density(&a)?, &read_density(&b)?)?;
            let pts = path.samples(samples)?;
            let t: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let states: Vec<MatrixJson> = pts.iter().map(|p| MatrixJson::from(p.1.as_hermitian())).collect();
            emit_json(&serde_json::json!({ "t": t, "states": states }))
        }
        Command::Curvature { rho, f } => {
            let entry = lookup(&f)?;
            emit_json(&scalar_curvature(&entry, &read_density(&rho)?)?)
        }
        Command::MetricEval { rho, a, b, f } => {
            let entry = lookup(&f)?;
            let v = metric_eval(
                &entry,
                &read_density(&rho)?,
                &read_tangent(&a)?,
                &read_tangent(&b)?,
            )?;
            let fields = serde_json::json!({
                "function_id": v.function_id,
                "inputs": [path_str(&rho), path_str(&a), path_str(&b)],
            });
            scalar_output(g.json, v.value, fields)
        }
        Command::Divergence { rho, sigma, g: gid } => {
            let gfun = lookup_g(&gid)?;
            let value = h_g_divergence(&read_density(&rho)?, &read_density(&sigma)?, &gfun)?;
            let fields = serde_json::json!({
                "g_id": gfun.id,
                "inputs": [path_str(&rho), path_str(&sigma)],
            });
            scalar_output(g.json, value, fields)
        }
        Command::Hessian {
            rho,
            a,
            b,
            g: gid,
            step,
        } => {
            let gfun = lookup_g(&gid)?;
            let r = hessian_check(
                &gfun,
                &read_density(&rho)?,
                &read_tangent(&a)?,
                &read_tangent(&b)?,
                step,
            )?;
            emit_json(&r)
        }
        Command::Verify {
            suite,
            n,
            trials,
            timing,
        } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![Suite::from_name(&suite)?]
            };
            let tolerances: BTreeMap<String, f64> = g.tolerances.into_iter().collect();
            if suites.len() > 1 && !tolerances.is_empty() {
                return Err(Failure::Usage("--tolerance needs a single suite".into()));
            }
            let mut reports = vec![];
            for s in suites {
                let mut cfg = SuiteConfig::new(s);
                cfg.seed = g.seed;
                if let Some(n) = &n {
                    cfg.n_values = n.clone();
                }
                if let Some(t) = trials {
                    cfg.trials = t;
                }
                cfg.tolerances = tolerances.clone();
                let start = Instant::now();
                let mut report = run_suite(&cfg)?;
                if timing {
                    report.wall_time_s = Some(start.elapsed().as_secs_f64());
                }
                for c in &report.checks {
                    eprintln!(
                        "{} {}: {} {} (actual {})",
                        if c.pass { "PASS" } else { "FAIL" },
                        report.suite,
                        c.name,
                        serde_json::to_string(&c.comparison)
                            .unwrap_or_default()
                            .trim_matches('"'),
                        c.actual
                    );
                }
                reports.push(report);
            }
            let passed = reports.iter().all(|r| r.passed);
            if reports.len() == 1 {
                emit_json(&reports[0])?;
            } else {
                emit_json(&reports)?;
            }
            if passed {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
