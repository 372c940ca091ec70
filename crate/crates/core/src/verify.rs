//! Seeded verification suites with machine-readable reports.
//!
//! Every suite is deterministic in its [`SuiteConfig`]: trials are drawn from
//! seeds derived per `(n, trial)` and results are reduced in trial order.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{scalar_curvature, unit_trace_correction};
use crate::divergence::{alpha_from_g, g_catalog, hessian_check, DEFAULT_HESSIAN_STEP, G_UMEGAKI, G_WY};
use crate::error::{Error, Result};
use crate::geometry::{
    bhattacharyya_distance, classical_scalar_curvature, dual_pair_check, exponential_transport,
    fisher_rao_metric, mixture_transport, path_length, pullback_condition_check, pullback_metric,
    score_inner, self_duality_scan, sphere_pullback_metric, sqrt_pullback, wy_distance, wy_distance_audited,
    wy_geodesic, ProbabilityVector, ScalarC1, ScoreVector,
};
use crate::monotone::{catalog, contraction_trials, metric_eval, wy_identity_sides, WY};
use crate::spectral::{
    derive_seed, hs_inner, random_density, random_density_with_mixing, random_hermitian, random_tangent,
    DensityMatrix, TangentVector,
};

/// The available suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    WyCurvature,
    Pullback,
    Hessian,
    Monotonicity,
    GeodesicLength,
    DualPairs,
    Classical,
    SkewIdentity,
    Alpha,
    DistanceBound,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::WyCurvature,
        Suite::Pullback,
        Suite::Hessian,
        Suite::Monotonicity,
        Suite::GeodesicLength,
        Suite::DualPairs,
        Suite::Classical,
        Suite::SkewIdentity,
        Suite::Alpha,
        Suite::DistanceBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::WyCurvature => "wy-curvature",
            Suite::Pullback => "pullback",
            Suite::Hessian => "hessian",
            Suite::Monotonicity => "monotonicity",
            Suite::GeodesicLength => "geodesic-length",
            Suite::DualPairs => "dual-pairs",
            Suite::Classical => "classical",
            Suite::SkewIdentity => "skew-identity",
            Suite::Alpha => "alpha",
            Suite::DistanceBound => "distance-bound",
        }
    }

    pub fn from_name(name: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::Unknown {
                kind: "suite",
                name: name.to_string(),
                known: Suite::ALL.map(Suite::name).join(", "),
            })
    }

    /// Default `(n_values, trials per n)`.
    pub fn defaults(self) -> (Vec<usize>, usize) {
        match self {
            Suite::WyCurvature => (vec![2, 3, 4], 20),
            Suite::Pullback => (vec![2, 3, 4, 5], 25),
            Suite::Hessian => (vec![2, 3, 4], 50),
            Suite::Monotonicity => (vec![2, 3], 250),
            Suite::GeodesicLength => (vec![2, 3], 10),
            Suite::DualPairs => (vec![3], 200),
            Suite::Classical => (vec![2, 3, 4, 5], 25),
            Suite::SkewIdentity => (vec![2, 3, 4, 5], 25),
            Suite::Alpha => (vec![2], 1),
            Suite::DistanceBound => (vec![2, 3, 4, 5], 2500),
        }
    }

    /// Names accepted by `--tolerance name=value`.
    pub fn tolerance_names(self) -> &'static [&'static str] {
        match self {
            Suite::WyCurvature => &["scal1"],
            Suite::Pullback => &["pullback", "pullback_condition"],
            Suite::Hessian => &["hessian"],
            Suite::Monotonicity => &["violations"],
            Suite::GeodesicLength => &["length", "order", "sphere_image"],
            Suite::DualPairs => &["symmetry_margin"],
            Suite::Classical => &["embedding", "sphere_pullback", "transport"],
            Suite::SkewIdentity => &["skew"],
            Suite::Alpha => &["alpha"],
            Suite::DistanceBound => &["clamp"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: String,
    pub n_values: Vec<usize>,
    /// Trials per dimension.
    pub trials: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        let (n_values, trials) = suite.defaults();
        Self {
            suite: suite.name().to_string(),
            n_values,
            trials,
            seed: 0,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<Suite> {
        let suite = Suite::from_name(&self.suite)?;
        if self.trials < 1 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one dimension is required".into(),
            ));
        }
        if let Some(n) = self.n_values.iter().find(|n| !(2..=16).contains(*n)) {
            return Err(Error::InvalidArgument(format!(
                "dimension {n} is outside [2, 16]"
            )));
        }
        for (name, v) in &self.tolerances {
            if !suite.tolerance_names().contains(&name.as_str()) {
                return Err(Error::Unknown {
                    kind: "tolerance",
                    name: name.clone(),
                    known: suite.tolerance_names().join(", "),
                });
            }
            if !(*v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance {name} must be >= 0, got {v}"
                )));
            }
        }
        Ok(suite)
    }

    fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    fn stream(&self, n: usize, trial: usize) -> u64 {
        derive_seed(self.seed, ((n as u64) << 32) | trial as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|actual − expected| ≤ tolerance`.
    Abs,
    /// `|actual − expected| ≤ tolerance · |expected|`.
    Rel,
    /// `actual ≤ expected`.
    AtMost,
    /// `actual ≥ expected`.
    AtLeast,
    /// Reported only; always passes.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub comparison: Comparison,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(
        name: impl Into<String>,
        comparison: Comparison,
        expected: f64,
        actual: f64,
        tolerance: f64,
    ) -> Self {
        let pass = match comparison {
            Comparison::Abs => (actual - expected).abs() <= tolerance,
            Comparison::Rel => (actual - expected).abs() <= tolerance * expected.abs(),
            Comparison::AtMost => actual <= expected,
            Comparison::AtLeast => actual >= expected,
            Comparison::Info => true,
        };
        Self {
            name: name.into(),
            comparison,
            expected,
            actual,
            tolerance,
            pass,
        }
    }

    fn abs(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        Self::new(name, Comparison::Abs, expected, actual, tolerance)
    }

    fn rel(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        Self::new(name, Comparison::Rel, expected, actual, tolerance)
    }

    fn at_most(name: impl Into<String>, bound: f64, actual: f64) -> Self {
        Self::new(name, Comparison::AtMost, bound, actual, 0.0)
    }

    fn at_least(name: impl Into<String>, bound: f64, actual: f64) -> Self {
        Self::new(name, Comparison::AtLeast, bound, actual, 0.0)
    }

    fn info(name: impl Into<String>, actual: f64) -> Self {
        Self::new(name, Comparison::Info, actual, actual, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub tool: String,
    pub version: String,
    pub suite: String,
    pub config: SuiteConfig,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<serde_json::Value>,
    /// Only filled in on request, since it breaks byte-identical output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl SuiteReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Largest value, with NaN winning so that a failed evaluation cannot hide.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0_f64, |m, v| {
        if v.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(v)
        }
    })
}

/// Runs `f(n, seed)` for every `(n, trial)` in parallel and returns results
/// grouped by `n`, in trial order.
fn per_trial<T: Send>(
    cfg: &SuiteConfig,
    f: impl Fn(usize, u64, usize) -> Result<T> + Sync,
) -> Result<Vec<(usize, Vec<T>)>> {
    cfg.n_values
        .iter()
        .map(|&n| {
            let rows = (0..cfg.trials)
                .into_par_iter()
                .map(|t| f(n, cfg.stream(n, t), t))
                .collect::<Result<Vec<T>>>()?;
            Ok((n, rows))
        })
        .collect()
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let suite = cfg.validate()?;
    let (checks, table) = match suite {
        Suite::WyCurvature => (wy_curvature(cfg)?, vec![]),
        Suite::Pullback => (pullback(cfg)?, vec![]),
        Suite::Hessian => (hessian(cfg)?, vec![]),
        Suite::Monotonicity => monotonicity(cfg)?,
        Suite::GeodesicLength => (geodesic_length(cfg)?, vec![]),
        Suite::DualPairs => dual_pairs(cfg)?,
        Suite::Classical => (classical(cfg)?, vec![]),
        Suite::SkewIdentity => (skew_identity(cfg)?, vec![]),
        Suite::Alpha => (alpha(cfg)?, vec![]),
        Suite::DistanceBound => (distance_bound(cfg)?, vec![]),
    };
    Ok(SuiteReport {
        tool: "qmetric".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        suite: suite.name().into(),
        config: cfg.clone(),
        passed: checks.iter().all(|c| c.pass),
        checks,
        table,
        wall_time_s: None,
    })
}

fn wy_curvature(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol("scal1", 1e-6);
    let rows = per_trial(cfg, |n, s, _| {
        Ok(scalar_curvature(&WY, &random_density(n, s))?.scal1)
    })?;
    Ok(rows
        .into_iter()
        .map(|(n, values)| {
            let expected = unit_trace_correction(n);
            let furthest = values.into_iter().fold(expected, |a, v| {
                if (v - expected).abs() > (a - expected).abs() || v.is_nan() {
                    v
                } else {
                    a
                }
            });
            Check::rel(format!("scal1[n={n}]"), expected, furthest, tol)
        })
        .collect())
}

fn pullback(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol("pullback", 1e-10);
    let rows = per_trial(cfg, |n, s, _| {
        let rho = random_density(n, s);
        let a = random_tangent(n, derive_seed(s, 1));
        let b = random_tangent(n, derive_seed(s, 2));
        let pb = pullback_metric(&rho, a.as_hermitian(), b.as_hermitian())?;
        let wy = metric_eval(&WY, &rho, &a, &b)?.value;
        let scale = (metric_eval(&WY, &rho, &a, &a)?.value * metric_eval(&WY, &rho, &b, &b)?.value).sqrt();
        Ok((pb - wy).abs() / scale)
    })?;
    let mut checks: Vec<Check> = rows
        .into_iter()
        .map(|(n, r)| Check::abs(format!("pullback_vs_wy[n={n}]"), 0.0, worst(r), tol))
        .collect();
    checks.push(Check::abs(
        "pullback_condition[2sqrt(x),wy]",
        0.0,
        pullback_condition_check(&ScalarC1::sqrt2(), &WY),
        cfg.tol("pullback_condition", 1e-12),
    ));
    Ok(checks)
}

/// Eigenvalue floor of the Hessian fixtures.
pub const HESSIAN_FLOOR: f64 = 5e-2;

fn hessian(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol("hessian", 1e-4);
    let mut checks = vec![];
    for g in g_catalog() {
        let rows = per_trial(cfg, |n, s, _| {
            let rho = random_density_with_mixing(n, s, HESSIAN_FLOOR * n as f64);
            let a = random_tangent(n, derive_seed(s, 1)).normalized();
            let b = random_tangent(n, derive_seed(s, 2)).normalized();
            Ok(hessian_check(&g, &rho, &a, &b, DEFAULT_HESSIAN_STEP)?.relative_residual())
        })?;
        for (n, r) in rows {
            checks.push(Check::abs(format!("hessian[{},n={n}]", g.id), 0.0, worst(r), tol));
        }
    }
    Ok(checks)
}

fn monotonicity(cfg: &SuiteConfig) -> Result<(Vec<Check>, Vec<serde_json::Value>)> {
    let allowed = cfg.tol("violations", 0.0);
    let mut checks = vec![];
    let mut table = vec![];
    for e in catalog() {
        for &n in &cfg.n_values {
            let seed = derive_seed(cfg.seed, n as u64);
            let r = contraction_trials(&e, n, cfg.trials, seed);
            checks.push(Check::abs(
                format!("contraction_violations[{},n={n}]", e.id),
                0.0,
                r.violations as f64,
                allowed,
            ));
            table.push(serde_json::json!({
                "function_id": e.id,
                "n": n,
                "trials": r.trials,
                "violations": r.violations,
                "skipped": r.skipped,
                "worst_margin": r.worst_margin,
            }));
        }
    }
    Ok((checks, table))
}

/// Trapezoid steps used for the length comparison.
pub const GEODESIC_STEPS: usize = 10_000;

fn random_diagonal_density(n: usize, seed: u64) -> Result<DensityMatrix> {
    DensityMatrix::from_diagonal(random_density(n, seed).eigenvalues())
}

fn geodesic_pair(n: usize, s: u64, trial: usize) -> Result<(DensityMatrix, DensityMatrix)> {
    if trial.is_multiple_of(2) {
        Ok((
            random_diagonal_density(n, s)?,
            random_diagonal_density(n, derive_seed(s, 1))?,
        ))
    } else {
        Ok((random_density(n, s), random_density(n, derive_seed(s, 1))))
    }
}

fn length_error(rho: &DensityMatrix, sigma: &DensityMatrix, steps: usize) -> Result<f64> {
    let path = wy_geodesic(rho, sigma)?;
    let len = path_length(&WY, |t| path.sample(t), steps)?;
    let d = wy_distance(rho, sigma)?;
    Ok((len - d).abs() / d)
}

fn geodesic_length(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol("length", 1e-4);
    let rows = per_trial(cfg, |n, s, t| {
        let (rho, sigma) = geodesic_pair(n, s, t)?;
        let err = length_error(&rho, &sigma, GEODESIC_STEPS)?;
        let path = wy_geodesic(&rho, &sigma)?;
        let mut sphere = 0.0_f64;
        for (_, g) in path.samples(11)? {
            let phi = sqrt_pullback(&g);
            sphere = sphere.max((hs_inner(&phi, &phi)? - 4.0).abs());
        }
        Ok((err, sphere))
    })?;
    let mut checks = vec![];
    let mut sphere_worst = 0.0_f64;
    for (n, r) in rows {
        checks.push(Check::abs(
            format!("length_vs_distance[n={n}]"),
            0.0,
            worst(r.iter().map(|x| x.0)),
            tol,
        ));
        sphere_worst = sphere_worst.max(worst(r.iter().map(|x| x.1)));
    }
    checks.push(Check::abs(
        "sphere_image",
        0.0,
        sphere_worst,
        cfg.tol("sphere_image", 1e-10),
    ));
    // step-halving on a non-commuting pair from the first dimension
    let n = cfg.n_values[0];
    let (rho, sigma) = geodesic_pair(n, cfg.stream(n, 1), 1)?;
    let e1 = length_error(&rho, &sigma, 200)?;
    let e2 = length_error(&rho, &sigma, 400)?;
    checks.push(Check::abs(
        "step_halving_ratio",
        4.0,
        e1 / e2,
        cfg.tol("order", 1.0),
    ));
    Ok(checks)
}

/// p-grid of the self-duality scan.
pub const SELF_DUALITY_GRID: [f64; 7] = [-1.0, -0.5, 0.25, 0.5, 0.75, 1.5, 2.0];

fn dual_pairs(cfg: &SuiteConfig) -> Result<(Vec<Check>, Vec<serde_json::Value>)> {
    let n = cfg.n_values[0];
    let margin = cfg.tol("symmetry_margin", 1e-2);
    let rows = self_duality_scan(&SELF_DUALITY_GRID, cfg.trials, n, cfg.seed)?;
    let mut checks = vec![];
    let mut table = vec![];
    for (p, r) in &rows {
        let expect = if *p == 0.5 { 1.0 } else { 0.0 };
        checks.push(Check::abs(
            format!("self_pair_passes[p={p}]"),
            expect,
            f64::from(u8::from(r.passed)),
            0.0,
        ));
        if *p == -1.0 || *p == 2.0 {
            checks.push(Check::at_least(
                format!("symmetry_defect_at_10[p={p}]"),
                margin,
                r.symmetry_defect_at_10,
            ));
        }
        let mut row = serde_json::to_value(r).map_err(|e| Error::Parse(e.to_string()))?;
        row["p"] = serde_json::json!(p);
        table.push(row);
    }
    let bkm = dual_pair_check(
        &ScalarC1::identity(),
        &ScalarC1::log(),
        cfg.trials,
        n,
        derive_seed(cfg.seed, 99),
    );
    checks.push(Check::abs(
        "pair_passes[x,log(x)]",
        1.0,
        f64::from(u8::from(bkm.passed)),
        0.0,
    ));
    let mut row = serde_json::to_value(&bkm).map_err(|e| Error::Parse(e.to_string()))?;
    row["p"] = serde_json::Value::Null;
    table.push(row);
    Ok((checks, table))
}

fn random_probability(n: usize, seed: u64) -> Result<ProbabilityVector> {
    ProbabilityVector::new(random_density(n, seed).eigenvalues().to_vec())
}

fn random_simplex_tangent(n: usize, seed: u64) -> Vec<f64> {
    let d = random_tangent(n, seed);
    (0..n).map(|i| d.as_matrix()[(i, i)].re).collect()
}

fn classical(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let rows = per_trial(cfg, |n, s, _| {
        let p = random_probability(n, s)?;
        let q = random_probability(n, derive_seed(s, 1))?;
        let rho = DensityMatrix::from_diagonal(p.as_slice())?;
        let sigma = DensityMatrix::from_diagonal(q.as_slice())?;
        let dist = (wy_distance(&rho, &sigma)? - bhattacharyya_distance(&p, &q)?).abs();
        let u = random_simplex_tangent(n, derive_seed(s, 2));
        let v = random_simplex_tangent(n, derive_seed(s, 3));
        let fr = fisher_rao_metric(&p, &u, &v)?;
        let ut = TangentVector::new(crate::spectral::HermitianMatrix::from_real_diagonal(&u))?;
        let vt = TangentVector::new(crate::spectral::HermitianMatrix::from_real_diagonal(&v))?;
        let metric = (metric_eval(&WY, &rho, &ut, &vt)?.value - fr).abs() / fr.abs().max(1.0);
        let sphere = (sphere_pullback_metric(&p, &u, &v)? - fr).abs() / fr.abs().max(1.0);
        let sc = ScoreVector::from_tangent(&u, &p)?;
        let tc = ScoreVector::from_tangent(&v, &p)?;
        let lhs = score_inner(&mixture_transport(&sc, &q)?, &exponential_transport(&tc, &q)?)?;
        let rhs = score_inner(&sc, &tc)?;
        let transport = (lhs - rhs).abs() / rhs.abs().max(1.0);
        Ok([dist, metric, sphere, transport])
    })?;
    let all: Vec<[f64; 4]> = rows.into_iter().flat_map(|(_, r)| r).collect();
    let col = |k: usize| worst(all.iter().map(|r| r[k]));
    let emb = cfg.tol("embedding", 1e-11);
    Ok(vec![
        Check::abs("diagonal_wy_vs_bhattacharyya", 0.0, col(0), emb),
        Check::abs("diagonal_wy_metric_vs_fisher_rao", 0.0, col(1), emb),
        Check::abs(
            "sphere_pullback_vs_fisher_rao",
            0.0,
            col(2),
            cfg.tol("sphere_pullback", 1e-12),
        ),
        Check::abs("transport_duality", 0.0, col(3), cfg.tol("transport", 1e-12)),
        Check::info("fisher_rao_scal[n=3]", classical_scalar_curvature(3)),
    ])
}

fn skew_identity(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol("skew", 1e-9);
    let rows = per_trial(cfg, |n, s, _| {
        let rho = random_density(n, s);
        let a = random_hermitian(n, derive_seed(s, 1));
        let (lhs, rhs) = wy_identity_sides(&rho, &a)?;
        Ok((lhs - rhs).abs() / rhs.abs().max(1.0))
    })?;
    Ok(rows
        .into_iter()
        .map(|(n, r)| Check::abs(format!("wy_commutator_vs_4_skew[n={n}]"), 0.0, worst(r), tol))
        .collect())
}

fn alpha(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol("alpha", 1e-12);
    Ok(vec![
        Check::abs("alpha[g_wy]", 0.0, alpha_from_g(&G_WY)?, tol),
        Check::abs("alpha[g_umegaki]", -1.0, alpha_from_g(&G_UMEGAKI)?, tol),
    ])
}

fn distance_bound(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let rows = per_trial(cfg, |n, s, _| {
        let d = wy_distance_audited(&random_density(n, s), &random_density(n, derive_seed(s, 1)))?;
        Ok((d.distance, d.clamped_by))
    })?;
    let all: Vec<(f64, f64)> = rows.into_iter().flat_map(|(_, r)| r).collect();
    let clamps = all.iter().filter(|r| r.1 > 0.0).count();
    Ok(vec![
        Check::at_most("max_distance", 2.0 * PI, worst(all.iter().map(|r| r.0))),
        Check::at_most(
            "max_clamp",
            cfg.tol("clamp", 1e-12),
            worst(all.iter().map(|r| r.1)),
        ),
        Check::info("clamp_count", clamps as f64),
        Check::info("pairs", all.len() as f64),
    ])
}
