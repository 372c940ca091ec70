//! Pull-back metrics of general maps `ρ ↦ φ(ρ)` and dual pairs `(φ, χ)`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::monotone::{sampled_operator_monotonicity, MonotoneFunctionEntry};
use crate::spectral::{
    check_dims, derive_seed, matrix_function, tangent_split, DensityMatrix, HermitianMatrix, TangentVector,
};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A C¹ function on `(0, ∞)` given together with its derivative.
#[derive(Clone)]
pub struct ScalarC1 {
    pub id: String,
    phi: ScalarFn,
    dphi: ScalarFn,
}

impl fmt::Debug for ScalarC1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarC1").field("id", &self.id).finish()
    }
}

impl ScalarC1 {
    pub fn new(
        id: impl Into<String>,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dphi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
        }
    }

    pub fn identity() -> Self {
        Self::new("x", |x| x, |_| 1.0)
    }

    /// `2√x`, the map behind the WY metric.
    pub fn sqrt2() -> Self {
        Self::new("2*sqrt(x)", |x| 2.0 * x.sqrt(), |x| 1.0 / x.sqrt())
    }

    pub fn log() -> Self {
        Self::new("log(x)", f64::ln, |x| 1.0 / x)
    }

    /// `x^p / p` for `p ≠ 0`.
    pub fn power(p: f64) -> Result<Self> {
        if p == 0.0 || !p.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "power family needs p != 0, got {p}"
            )));
        }
        Ok(Self::new(
            format!("x^{p}/{p}"),
            move |x| x.powf(p) / p,
            move |x| x.powf(p - 1.0),
        ))
    }

    /// The partner `x^{1−p} / (1−p)` of [`Self::power`].
    pub fn dual_power(p: f64) -> Result<Self> {
        Self::power(1.0 - p)
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    pub fn dphi(&self, x: f64) -> f64 {
        (self.dphi)(x)
    }

    /// `(φ(x) − φ(y)) / (x − y)`, with `φ'` at (nearly) equal arguments.
    pub fn difference_quotient(&self, x: f64, y: f64) -> f64 {
        if (x - y).abs() <= 1e-8 * x.max(y) {
            self.dphi(0.5 * (x + y))
        } else {
            (self.phi(x) - self.phi(y)) / (x - y)
        }
    }
}

/// `(D_ρφ)(A) = φ'(ρ) A^c + i[φ(ρ), U]` where `A = A^c + i[ρ, U]`.
pub fn general_pullback_differential(
    phi: &ScalarC1,
    rho: &DensityMatrix,
    a: &TangentVector,
) -> Result<HermitianMatrix> {
    check_dims(rho.dim(), a.dim())?;
    let decomp = rho.spectrum();
    let dphi: Vec<f64> = decomp.eigenvalues.iter().map(|&x| phi.dphi(x)).collect();
    if let Some(k) = dphi.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "derivative of `{}` is not finite at eigenvalue {}",
            phi.id, decomp.eigenvalues[k]
        )));
    }
    let split = tangent_split(rho, a)?;
    let mut ac = decomp.to_eigenbasis(split.commuting.as_matrix());
    let n = rho.dim();
    for i in 0..n {
        for j in 0..n {
            // nonzero only inside degeneracy blocks, where φ'(λ_i) ≈ φ'(λ_j)
            ac[(i, j)] *= 0.5 * (dphi[i] + dphi[j]);
        }
    }
    let first = HermitianMatrix::from_matrix_lossy(decomp.from_eigenbasis(&ac));
    let phi_rho = matrix_function(rho, |x| phi.phi(x))?;
    first.add(&phi_rho.i_commutator(&split.generator)?)
}

/// Log-spaced points on `[1e-3, 1e3]`.
pub(crate) fn log_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / (points - 1) as f64))
        .collect()
}

const CONDITION_GRID_POINTS: usize = 100;

/// Largest `|q² − c(x, y)| / max(1, c(x, y))` on a 100×100 log grid, where
/// `q = (φ(x) − φ(y))/(x − y)` off the diagonal and `q = φ'(x)` on it.
pub fn pullback_condition_residual(phi: &ScalarC1, c: impl Fn(f64, f64) -> f64) -> f64 {
    let grid = log_grid(CONDITION_GRID_POINTS);
    let mut worst = 0.0_f64;
    for (i, &x) in grid.iter().enumerate() {
        for (j, &y) in grid.iter().enumerate() {
            let q = if i == j {
                phi.dphi(x)
            } else {
                (phi.phi(x) - phi.phi(y)) / (x - y)
            };
            let cxy = c(x, y);
            let r = (q * q - cxy).abs() / cxy.abs().max(1.0);
            worst = if r.is_nan() { f64::INFINITY } else { worst.max(r) };
        }
    }
    worst
}

/// [`pullback_condition_residual`] against a catalog kernel.
pub fn pullback_condition_check(phi: &ScalarC1, entry: &MonotoneFunctionEntry) -> f64 {
    pullback_condition_residual(phi, entry.c)
}

pub const DUALITY_GRID_POINTS: usize = 101;
/// Largest relative defect `|f(x) − x f(1/x)| / max(1, |f(x)|)` counted as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-10;
const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualPairReport {
    pub phi_id: String,
    pub chi_id: String,
    /// Induced `c` finite and positive on the grid.
    pub induced_c_valid: bool,
    pub f_normalized: bool,
    pub f_symmetric: bool,
    pub monotonicity_violations: usize,
    pub monotonicity_trials: usize,
    pub monotonicity_skipped: usize,
    pub max_symmetry_defect: f64,
    pub symmetry_defect_at_10: f64,
    pub passed: bool,
}

fn symmetry_defect(f: &impl Fn(f64) -> f64, x: f64) -> f64 {
    let fx = f(x);
    (fx - x * f(1.0 / x)).abs() / fx.abs().max(1.0)
}

/// Checks whether `c(x, y) = q_φ(x, y) q_χ(x, y)` comes from a normalized,
/// symmetric operator monotone `f(t) = 1/c(t, 1)`.
pub fn dual_pair_check(phi: &ScalarC1, chi: &ScalarC1, trials: usize, n: usize, seed: u64) -> DualPairReport {
    let c = |x: f64, y: f64| phi.difference_quotient(x, y) * chi.difference_quotient(x, y);
    let f = |t: f64| 1.0 / c(t, 1.0);
    let grid = log_grid(DUALITY_GRID_POINTS);
    let induced_c_valid = grid.iter().all(|&x| {
        grid.iter().all(|&y| {
            let v = c(x, y);
            v.is_finite() && v > 0.0
        })
    });
    let f_normalized = (f(1.0) - 1.0).abs() <= NORMALIZATION_TOL;
    let max_symmetry_defect = grid
        .iter()
        .map(|&x| symmetry_defect(&f, x))
        .fold(0.0_f64, |m, d| if d.is_nan() { f64::INFINITY } else { m.max(d) });
    let f_symmetric = max_symmetry_defect <= SYMMETRY_TOL;
    let sampled = sampled_operator_monotonicity(&phi.id, f, trials, n, seed);
    let passed =
        induced_c_valid && f_normalized && f_symmetric && sampled.violations == 0 && sampled.skipped < trials;
    DualPairReport {
        phi_id: phi.id.clone(),
        chi_id: chi.id.clone(),
        induced_c_valid,
        f_normalized,
        f_symmetric,
        monotonicity_violations: sampled.violations,
        monotonicity_trials: trials,
        monotonicity_skipped: sampled.skipped,
        max_symmetry_defect,
        symmetry_defect_at_10: symmetry_defect(&f, 10.0),
        passed,
    }
}

/// Runs [`dual_pair_check`] on the self-pairs `(x^p/p, x^p/p)`.
pub fn self_duality_scan(
    p_grid: &[f64],
    trials: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<(f64, DualPairReport)>> {
    p_grid
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            if !(-1.0..=2.0).contains(&p) || p == 0.0 || p == 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "self-duality grid must lie in [-1, 2] without 0 and 1, got {p}"
                )));
            }
            let phi = ScalarC1::power(p)?;
            Ok((
                p,
                dual_pair_check(&phi, &phi, trials, n, derive_seed(seed, k as u64)),
            ))
        })
        .collect()
}
