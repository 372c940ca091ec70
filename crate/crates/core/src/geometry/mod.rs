//! Wigner-Yanase geometry through the map `φ(ρ) = 2√ρ`, which sends states
//! onto the radius-2 sphere of Hilbert-Schmidt space.

mod classical;
mod duality;

pub use classical::{
    bhattacharyya_distance, classical_geodesic, classical_scalar_curvature, exponential_transport,
    fisher_rao_metric, mixture_transport, score_inner, simplex_sphere_map, sphere_map_differential,
    sphere_pullback_metric, ProbabilityVector, ScoreVector,
};
pub use duality::{
    dual_pair_check, general_pullback_differential, pullback_condition_check, pullback_condition_residual,
    self_duality_scan, DualPairReport, ScalarC1, DUALITY_GRID_POINTS, SYMMETRY_TOL,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monotone::{metric_eval, MonotoneFunctionEntry};
use crate::spectral::{
    apply_kernel_superop, check_dims, hs_inner, DensityMatrix, HermitianMatrix, TangentVector,
};

/// `φ(ρ) = 2√ρ`.
pub fn sqrt_pullback(rho: &DensityMatrix) -> HermitianMatrix {
    rho.sqrt().scale(2.0)
}

/// `D_ρφ(A) = 2 (L_ρ^{1/2} + R_ρ^{1/2})⁻¹ (A)`.
pub fn pullback_differential(rho: &DensityMatrix, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_dims(rho.dim(), a.dim())?;
    apply_kernel_superop(rho, |x, y| 2.0 / (x.sqrt() + y.sqrt()), a)
}

/// `⟨D_ρφ(A), D_ρφ(B)⟩_HS`, which equals the WY metric.
pub fn pullback_metric(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    check_dims(rho.dim(), b.dim())?;
    hs_inner(&pullback_differential(rho, a)?, &pullback_differential(rho, b)?)
}

/// Largest amount the arccos argument may be pulled back into `[−1, 1]`.
pub const CLAMP_WINDOW: f64 = 1e-12;

/// A distance with the amount its arccos argument was clamped by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditedDistance {
    pub distance: f64,
    pub overlap: f64,
    pub clamped_by: f64,
}

pub(crate) fn audited_arccos(overlap: f64, scale: f64) -> Result<AuditedDistance> {
    let clamped = overlap.clamp(-1.0, 1.0);
    let clamped_by = (overlap - clamped).abs();
    if clamped_by > CLAMP_WINDOW {
        return Err(Error::Invariant(format!(
            "overlap {overlap} lies outside [-1, 1] by more than {CLAMP_WINDOW:e}"
        )));
    }
    Ok(AuditedDistance {
        distance: scale * clamped.acos(),
        overlap,
        clamped_by,
    })
}

/// `2 arccos Tr(ρ^{1/2} σ^{1/2})` with its clamp audit.
pub fn wy_distance_audited(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<AuditedDistance> {
    check_dims(rho.dim(), sigma.dim())?;
    let overlap = hs_inner(&rho.sqrt(), &sigma.sqrt())?;
    audited_arccos(overlap, 2.0)
}

/// WY geodesic distance `d(ρ, σ) = 2 arccos Tr(ρ^{1/2} σ^{1/2})`.
pub fn wy_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    wy_distance_audited(rho, sigma).map(|d| d.distance)
}

/// The WY geodesic `γ(t) = M_t² / Tr M_t²` with `M_t = (1−t)√ρ + t√σ`.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    endpoint_a: DensityMatrix,
    endpoint_b: DensityMatrix,
    sqrt_a: HermitianMatrix,
    sqrt_b: HermitianMatrix,
}

impl GeodesicPath {
    pub fn endpoint_a(&self) -> &DensityMatrix {
        &self.endpoint_a
    }

    pub fn endpoint_b(&self) -> &DensityMatrix {
        &self.endpoint_b
    }

    pub fn sample(&self, t: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "path parameter {t} is outside [0, 1]"
            )));
        }
        if t == 0.0 {
            return Ok(self.endpoint_a.clone());
        }
        if t == 1.0 {
            return Ok(self.endpoint_b.clone());
        }
        let m = self.sqrt_a.lincomb(1.0 - t, &self.sqrt_b, t)?;
        let sq = HermitianMatrix::from_matrix_lossy(m.as_matrix() * m.as_matrix());
        DensityMatrix::normalized(&sq).map_err(|e| Error::PathSample {
            t,
            reason: e.to_string(),
        })
    }

    /// `k ≥ 2` evenly spaced samples including both endpoints.
    pub fn samples(&self, k: usize) -> Result<Vec<(f64, DensityMatrix)>> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 samples, got {k}"
            )));
        }
        (0..k)
            .map(|i| {
                let t = i as f64 / (k - 1) as f64;
                self.sample(t).map(|s| (t, s))
            })
            .collect()
    }
}

pub fn wy_geodesic(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<GeodesicPath> {
    check_dims(rho.dim(), sigma.dim())?;
    Ok(GeodesicPath {
        endpoint_a: rho.clone(),
        endpoint_b: sigma.clone(),
        sqrt_a: rho.sqrt(),
        sqrt_b: sigma.sqrt(),
    })
}

pub const MIN_PATH_STEPS: usize = 100;

/// Riemannian length `∫₀¹ √g(γ̇, γ̇) dt` by the trapezoid rule.
///
/// Velocities use central differences inside the interval and one-sided
/// second-order differences at the endpoints.
pub fn path_length(
    entry: &MonotoneFunctionEntry,
    path: impl Fn(f64) -> Result<DensityMatrix> + Sync,
    steps: usize,
) -> Result<f64> {
    if steps < MIN_PATH_STEPS {
        return Err(Error::InvalidArgument(format!(
            "path_length needs at least {MIN_PATH_STEPS} steps, got {steps}"
        )));
    }
    let h = 1.0 / steps as f64;
    let points: Vec<DensityMatrix> = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 * h;
            path(t).map_err(|e| match e {
                e @ Error::PathSample { .. } => e,
                other => Error::PathSample {
                    t,
                    reason: other.to_string(),
                },
            })
        })
        .collect::<Result<_>>()?;
    let m = |k: usize| points[k].as_hermitian();
    let speeds: Vec<f64> = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let v = if k == 0 {
                m(1).lincomb(4.0, m(2), -1.0)?.lincomb(1.0, m(0), -3.0)?
            } else if k == steps {
                m(k - 1).lincomb(-4.0, m(k - 2), 1.0)?.lincomb(1.0, m(k), 3.0)?
            } else {
                m(k + 1).sub(m(k - 1))?
            };
            let v = TangentVector::project(&v.scale(0.5 / h));
            let g = metric_eval(entry, &points[k], &v, &v)?.value;
            Ok(g.max(0.0).sqrt())
        })
        .collect::<Result<_>>()?;
    let inner: f64 = speeds[1..steps].iter().sum();
    Ok(h * (inner + 0.5 * (speeds[0] + speeds[steps])))
}
