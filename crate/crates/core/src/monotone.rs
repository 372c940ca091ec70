//! Operator monotone functions and the monotone metrics they define.
//!
//! A normalised, symmetric operator monotone `f` (`f(1) = 1`,
//! `f(x) = x f(1/x)`) fixes the Chentsov–Morozova kernel
//! `c_f(x, y) = 1 / (y f(x/y))` and with it the metric
//!
//! ```text
//! ⟨A, B⟩_{ρ,f} = Tr(A · c_f(L_ρ, R_ρ)(B))
//! ```
//!
//! The catalog ships four members of the family:
//!
//! | id    | `f(x)`            | `c_f(x, y)`               |
//! |-------|-------------------|---------------------------|
//! | `wy`  | `(√x + 1)² / 4`   | `4 / (√x + √y)²`          |
//! | `sld` | `(1 + x) / 2`     | `2 / (x + y)`             |
//! | `bkm` | `(x − 1) / log x` | `(log x − log y)/(x − y)` |
//! | `rld` | `2x / (1 + x)`    | `(x + y) / (2xy)`         |
//!
//! Entries are plain values. Tests build fixtures such as `x ↦ x²` without
//! touching [`catalog`].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    self, apply_kernel_superop, derive_seed, hermitian_function, hs_inner, random_density,
    random_kraus_channel, random_tangent, seeded_rng, CMatrix, DensityMatrix, HermitianMatrix, KrausChannel,
    TangentVector,
};

/// A named operator monotone function with its kernel and kernel derivative.
#[derive(Debug, Clone, Copy)]
pub struct MonotoneFunctionEntry {
    pub id: &'static str,
    pub f: fn(f64) -> f64,
    /// `c_f(x, y)`.
    pub c: fn(f64, f64) -> f64,
    /// `∂c_f/∂x` in closed form.
    pub dc_dx: fn(f64, f64) -> f64,
    pub f_complex: Option<fn(Complex64) -> Complex64>,
    pub c_complex: Option<fn(Complex64, Complex64) -> Complex64>,
}

impl MonotoneFunctionEntry {
    /// Whether `f` and `c` accept complex arguments near the positive axis.
    pub fn complex_evaluable(&self) -> bool {
        self.f_complex.is_some() && self.c_complex.is_some()
    }

    /// `∂c/∂x` by complex-step differentiation, for checking [`Self::dc_dx`].
    pub fn dc_dx_complex_step(&self, x: f64, y: f64) -> Option<f64> {
        const H: f64 = 1e-20;
        let c = self.c_complex?;
        Some(c(Complex64::new(x, H), Complex64::new(y, 0.0)).im / H)
    }

    /// `(log c)'(x, y) = ∂_x c / c`.
    pub fn log_c_dx(&self, x: f64, y: f64) -> f64 {
        (self.dc_dx)(x, y) / (self.c)(x, y)
    }
}

fn wy_f(x: f64) -> f64 {
    0.25 * (x.sqrt() + 1.0).powi(2)
}
fn wy_c(x: f64, y: f64) -> f64 {
    4.0 / (x.sqrt() + y.sqrt()).powi(2)
}
fn wy_dc(x: f64, y: f64) -> f64 {
    let sx = x.sqrt();
    -4.0 / (sx * (sx + y.sqrt()).powi(3))
}
fn wy_fz(z: Complex64) -> Complex64 {
    (z.sqrt() + 1.0).powi(2) * 0.25
}
fn wy_cz(z: Complex64, w: Complex64) -> Complex64 {
    Complex64::new(4.0, 0.0) / (z.sqrt() + w.sqrt()).powi(2)
}

fn sld_f(x: f64) -> f64 {
    0.5 * (1.0 + x)
}
fn sld_c(x: f64, y: f64) -> f64 {
    2.0 / (x + y)
}
fn sld_dc(x: f64, y: f64) -> f64 {
    -2.0 / (x + y).powi(2)
}
fn sld_fz(z: Complex64) -> Complex64 {
    (z + 1.0) * 0.5
}
fn sld_cz(z: Complex64, w: Complex64) -> Complex64 {
    Complex64::new(2.0, 0.0) / (z + w)
}

fn rld_f(x: f64) -> f64 {
    2.0 * x / (1.0 + x)
}
fn rld_c(x: f64, y: f64) -> f64 {
    (x + y) / (2.0 * x * y)
}
fn rld_dc(x: f64, _y: f64) -> f64 {
    -0.5 / (x * x)
}
fn rld_fz(z: Complex64) -> Complex64 {
    z * 2.0 / (z + 1.0)
}
fn rld_cz(z: Complex64, w: Complex64) -> Complex64 {
    (z + w) / (z * w * 2.0)
}

fn bkm_f(x: f64) -> f64 {
    let u = x - 1.0;
    if u == 0.0 {
        1.0
    } else if u.abs() <= 0.5 {
        u / u.ln_1p()
    } else {
        u / x.ln()
    }
}

/// `(log x − log y)/(x − y) = log1p(u)/(u·y)` with `u = (x − y)/y`.
fn bkm_c(x: f64, y: f64) -> f64 {
    let d = x - y;
    let u = d / y;
    if u.abs() <= 1e-6 {
        (1.0 - u / 2.0 + u * u / 3.0 - u * u * u / 4.0) / y
    } else if u.abs() <= 0.5 {
        u.ln_1p() / d
    } else {
        (x / y).ln() / d
    }
}

/// `((x − y)/x − log(x/y)) / (x − y)²`, written in `s = (x − y)/x` as
/// `−x⁻² Σ_{k≥2} s^{k−2}/k`.
fn bkm_dc(x: f64, y: f64) -> f64 {
    let d = x - y;
    let s = d / x;
    if s.abs() <= 1e-3 {
        let mut acc = 0.0;
        let mut p = 1.0;
        for k in 2..10 {
            acc += p / k as f64;
            p *= s;
        }
        -acc / (x * x)
    } else if s.abs() <= 0.5 {
        (s + (-s).ln_1p()) / (d * d)
    } else {
        (s + (y / x).ln()) / (d * d)
    }
}
fn bkm_fz(z: Complex64) -> Complex64 {
    (z - 1.0) / z.ln()
}
fn bkm_cz(z: Complex64, w: Complex64) -> Complex64 {
    (z.ln() - w.ln()) / (z - w)
}

pub const WY: MonotoneFunctionEntry = MonotoneFunctionEntry {
    id: "wy",
    f: wy_f,
    c: wy_c,
    dc_dx: wy_dc,
    f_complex: Some(wy_fz),
    c_complex: Some(wy_cz),
};

pub const SLD: MonotoneFunctionEntry = MonotoneFunctionEntry {
    id: "sld",
    f: sld_f,
    c: sld_c,
    dc_dx: sld_dc,
    f_complex: Some(sld_fz),
    c_complex: Some(sld_cz),
};

pub const BKM: MonotoneFunctionEntry = MonotoneFunctionEntry {
    id: "bkm",
    f: bkm_f,
    c: bkm_c,
    dc_dx: bkm_dc,
    f_complex: Some(bkm_fz),
    c_complex: Some(bkm_cz),
};

pub const RLD: MonotoneFunctionEntry = MonotoneFunctionEntry {
    id: "rld",
    f: rld_f,
    c: rld_c,
    dc_dx: rld_dc,
    f_complex: Some(rld_fz),
    c_complex: Some(rld_cz),
};

pub fn catalog() -> Vec<MonotoneFunctionEntry> {
    vec![WY, SLD, BKM, RLD]
}

pub fn catalog_ids() -> Vec<&'static str> {
    catalog().iter().map(|e| e.id).collect()
}

pub fn lookup(id: &str) -> Result<MonotoneFunctionEntry> {
    catalog()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::Unknown {
            kind: "monotone function",
            name: id.to_string(),
            known: catalog_ids().join(", "),
        })
}

/// `⟨A, B⟩_{ρ,f}` together with the function it was evaluated for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricValue {
    pub value: f64,
    pub function_id: &'static str,
}

/// `Tr(A · k(L_ρ, R_ρ)(B))` for an arbitrary kernel.
pub fn metric_with_kernel(
    rho: &DensityMatrix,
    k: impl Fn(f64, f64) -> f64,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<f64> {
    spectral::check_dims(rho.dim(), a.dim())?;
    let kb = apply_kernel_superop(rho, k, b)?;
    hs_inner(a, &kb)
}

/// Petz metric `⟨A, B⟩_{ρ,f} = Tr(A · c_f(L_ρ, R_ρ)(B))`.
pub fn metric_eval(
    entry: &MonotoneFunctionEntry,
    rho: &DensityMatrix,
    a: &TangentVector,
    b: &TangentVector,
) -> Result<MetricValue> {
    let value = metric_with_kernel(rho, entry.c, a.as_hermitian(), b.as_hermitian())?;
    Ok(MetricValue {
        value,
        function_id: entry.id,
    })
}

/// Skew information `I(ρ, A) = −Tr([ρ^{1/2}, A]²)`.
///
/// The commutator is anti-Hermitian, so this is `‖[ρ^{1/2}, A]‖²_HS ≥ 0`.
pub fn skew_information(rho: &DensityMatrix, a: &HermitianMatrix) -> Result<f64> {
    spectral::check_dims(rho.dim(), a.dim())?;
    let s = rho.sqrt();
    let comm: CMatrix = s.as_matrix() * a.as_matrix() - a.as_matrix() * s.as_matrix();
    Ok(comm.iter().map(|z| z.norm_sqr()).sum())
}

/// Both sides of `⟨i[ρ,A], i[ρ,A]⟩_wy = 4 I(ρ, A)`.
pub fn wy_identity_sides(rho: &DensityMatrix, a: &HermitianMatrix) -> Result<(f64, f64)> {
    let t = TangentVector::project(&rho.as_hermitian().i_commutator(a)?);
    let lhs = metric_eval(&WY, rho, &t, &t)?.value;
    let rhs = 4.0 * skew_information(rho, a)?;
    Ok((lhs, rhs))
}

/// `|⟨i[ρ,A], i[ρ,A]⟩_wy − 4 I(ρ, A)|`.
pub fn wy_identity_check(rho: &DensityMatrix, a: &HermitianMatrix) -> Result<f64> {
    let (lhs, rhs) = wy_identity_sides(rho, a)?;
    Ok((lhs - rhs).abs())
}

/// Outcome of a sampled harness. Violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledReport {
    pub function_id: String,
    pub trials: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub skipped: usize,
}

enum TrialOutcome {
    Margin(f64),
    Skipped,
}

fn summarize(
    function_id: &str,
    trials: usize,
    outcomes: Vec<TrialOutcome>,
    violated: impl Fn(f64) -> bool,
) -> SampledReport {
    let mut report = SampledReport {
        function_id: function_id.to_string(),
        trials,
        violations: 0,
        worst_margin: f64::INFINITY,
        skipped: 0,
    };
    for o in outcomes {
        match o {
            TrialOutcome::Margin(m) => {
                if violated(m) {
                    report.violations += 1;
                }
                report.worst_margin = report.worst_margin.min(m);
            }
            TrialOutcome::Skipped => report.skipped += 1,
        }
    }
    report
}

/// Slack below zero tolerated in `λ_min(f(B) − f(A))`.
pub const MONOTONICITY_SLACK: f64 = 1e-9;

/// Samples pairs `0 ≤ A ≤ B` and checks `f(A) ≤ f(B)`.
///
/// `A = QQ†` and `B = A + t·PP†` with Gaussian `Q`, `P` and `t` log-uniform
/// on `[1e-2, 10]`. The margin of a trial is `λ_min(f(B) − f(A))`.
pub fn sampled_operator_monotonicity(
    function_id: &str,
    f: impl Fn(f64) -> f64 + Sync,
    trials: usize,
    n: usize,
    seed: u64,
) -> SampledReport {
    use rand::Rng;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = seeded_rng(derive_seed(seed, trial as u64));
            let q = spectral::random_hermitian(n, rng.random());
            let p = spectral::random_hermitian(n, rng.random());
            let t = 10f64.powf(rng.random_range(-2.0..1.0));
            let a = HermitianMatrix::from_matrix_lossy(q.as_matrix() * q.as_matrix());
            let pp = HermitianMatrix::from_matrix_lossy(p.as_matrix() * p.as_matrix());
            let b = a.lincomb(1.0, &pp, t).expect("same dimension");
            let fa = hermitian_function(&a, &f);
            let fb = hermitian_function(&b, &f);
            match (fa, fb) {
                (Ok(fa), Ok(fb)) => match fb.sub(&fa).and_then(|d| d.smallest_eigenvalue()) {
                    Ok(m) => TrialOutcome::Margin(m),
                    Err(_) => TrialOutcome::Skipped,
                },
                _ => TrialOutcome::Skipped,
            }
        })
        .collect();
    summarize(function_id, trials, outcomes, |m| m < -MONOTONICITY_SLACK)
}

impl MonotoneFunctionEntry {
    pub fn sampled_monotonicity(&self, trials: usize, n: usize, seed: u64) -> SampledReport {
        sampled_operator_monotonicity(self.id, self.f, trials, n, seed)
    }
}

/// Result of comparing `g_{T(ρ)}(TA, TA)` against `g_ρ(A, A)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ContractionOutcome {
    Checked {
        g_before: f64,
        g_after: f64,
        /// `T(ρ)` was numerically singular and got mixed with `I/m`.
        floored: bool,
    },
    Skipped {
        reason: String,
    },
}

/// Relative slack of the contraction inequality.
pub const CONTRACTION_SLACK: f64 = 1e-9;
const SINGULAR_OUTPUT: f64 = 1e-14;
const OUTPUT_FLOOR_MIXING: f64 = 1e-9;

impl ContractionOutcome {
    pub fn violates(&self) -> bool {
        match *self {
            ContractionOutcome::Checked {
                g_before, g_after, ..
            } => g_after > g_before + CONTRACTION_SLACK * (1.0 + g_before),
            ContractionOutcome::Skipped { .. } => false,
        }
    }
}

/// Evaluates both sides of the monotonicity inequality for one channel.
pub fn contraction_check(
    entry: &MonotoneFunctionEntry,
    t: &KrausChannel,
    rho: &DensityMatrix,
    a: &TangentVector,
) -> Result<ContractionOutcome> {
    spectral::check_dims(t.input_dim(), rho.dim())?;
    spectral::check_dims(rho.dim(), a.dim())?;
    let out = t.apply(rho.as_hermitian())?;
    let lmin = out.smallest_eigenvalue()?;
    let (image, floored) = if lmin > SINGULAR_OUTPUT {
        (DensityMatrix::new(out)?, false)
    } else {
        let m = out.dim();
        let mixed = out.lincomb(
            1.0 - OUTPUT_FLOOR_MIXING,
            &HermitianMatrix::identity(m),
            OUTPUT_FLOOR_MIXING / m as f64,
        )?;
        match DensityMatrix::new(mixed) {
            Ok(d) => (d, true),
            Err(e) => {
                return Ok(ContractionOutcome::Skipped {
                    reason: format!("T(rho) is not full rank after flooring: {e}"),
                })
            }
        }
    };
    let ta = t.apply_tangent(a)?;
    let g_before = metric_eval(entry, rho, a, a)?.value;
    let g_after = metric_eval(entry, &image, &ta, &ta)?.value;
    Ok(ContractionOutcome::Checked {
        g_before,
        g_after,
        floored,
    })
}

/// Random channels on `M_n` with environment dimension cycling through
/// `1..=n`; margin is `g_before − g_after` plus the allowed slack.
pub fn contraction_trials(
    entry: &MonotoneFunctionEntry,
    n: usize,
    trials: usize,
    seed: u64,
) -> SampledReport {
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let s = derive_seed(seed, trial as u64);
            let env = 1 + trial % n;
            let outcome = random_kraus_channel(n, n, env, s).and_then(|t| {
                let rho = random_density(n, s);
                let a = random_tangent(n, s).normalized();
                contraction_check(entry, &t, &rho, &a)
            });
            match outcome {
                Ok(ContractionOutcome::Checked {
                    g_before, g_after, ..
                }) => TrialOutcome::Margin(g_before - g_after + CONTRACTION_SLACK * (1.0 + g_before)),
                _ => TrialOutcome::Skipped,
            }
        })
        .collect();
    summarize(entry.id, trials, outcomes, |m| m < 0.0)
}
