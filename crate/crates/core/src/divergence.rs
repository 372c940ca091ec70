//! Relative g-entropies, the associated monotone metric and comparison
//! divergences.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::monotone::metric_with_kernel;
use crate::spectral::{
    check_dims, hermitian_function, spectral_decompose, CMatrix, DensityMatrix, HermitianMatrix,
    TangentVector,
};

/// An operator convex `g` on `(0, ∞)` with `g(1) = 0`.
#[derive(Debug, Clone, Copy)]
pub struct OperatorConvexG {
    pub id: &'static str,
    pub g: fn(f64) -> f64,
    /// `g''(1)`.
    pub d2_at_1: f64,
    /// `g'''(1)`.
    pub d3_at_1: f64,
    /// `g''''(1)`, needed for the second-order term of `f_g` at 1.
    pub d4_at_1: f64,
    /// Cancellation-free closed form of `g(x) + x g(1/x)`, if known.
    pub symmetric_sum: Option<fn(f64) -> f64>,
}

fn g_wy(x: f64) -> f64 {
    4.0 * (1.0 - x.sqrt())
}

fn g_wy_sym(x: f64) -> f64 {
    // 4(√x − 1)², with √x − 1 rewritten to avoid cancellation
    let r = (x - 1.0) / (x.sqrt() + 1.0);
    4.0 * r * r
}

fn g_umegaki(x: f64) -> f64 {
    -x.ln()
}

fn g_umegaki_sym(x: f64) -> f64 {
    (x - 1.0) * x.ln()
}

pub const G_WY: OperatorConvexG = OperatorConvexG {
    id: "g_wy",
    g: g_wy,
    d2_at_1: 1.0,
    d3_at_1: -1.5,
    d4_at_1: 3.75,
    symmetric_sum: Some(g_wy_sym),
};

pub const G_UMEGAKI: OperatorConvexG = OperatorConvexG {
    id: "g_umegaki",
    g: g_umegaki,
    d2_at_1: 1.0,
    d3_at_1: -2.0,
    d4_at_1: 6.0,
    symmetric_sum: Some(g_umegaki_sym),
};

pub fn g_catalog() -> Vec<OperatorConvexG> {
    vec![G_WY, G_UMEGAKI]
}

/// Accepts both `g_wy` and the short form `wy`.
pub fn lookup_g(id: &str) -> Result<OperatorConvexG> {
    g_catalog()
        .into_iter()
        .find(|g| g.id == id || g.id.strip_prefix("g_") == Some(id))
        .ok_or_else(|| Error::Unknown {
            kind: "divergence function",
            name: id.to_string(),
            known: g_catalog().iter().map(|g| g.id).collect::<Vec<_>>().join(", "),
        })
}

/// Width of the window around 1 where `f_g` is taken from its Taylor series.
pub const F_SERIES_WINDOW: f64 = 1e-4;

impl OperatorConvexG {
    /// `f_g(x) = (x − 1)² / (g(x) + x g(1/x))`.
    pub fn f(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Domain(format!("f_g needs x > 0, got {x}")));
        }
        let u = x - 1.0;
        if u.abs() < F_SERIES_WINDOW {
            let (g2, g3, g4) = (self.d2_at_1, self.d3_at_1, self.d4_at_1);
            let a2 = -0.25 - g3 / (3.0 * g2) - g4 / (12.0 * g2);
            return Ok((1.0 + u * (0.5 + a2 * u)) / g2);
        }
        let den = match self.symmetric_sum {
            Some(s) => s(x),
            None => (self.g)(x) + x * (self.g)(1.0 / x),
        };
        let v = u * u / den;
        if den == 0.0 || !v.is_finite() {
            return Err(Error::Domain(format!(
                "g(x) + x g(1/x) vanishes at x = {x} for `{}`",
                self.id
            )));
        }
        Ok(v)
    }

    /// `c_{f_g}(x, y) = 1 / (y f_g(x/y))`.
    pub fn c(&self, x: f64, y: f64) -> Result<f64> {
        Ok(1.0 / (y * self.f(x / y)?))
    }
}

/// The monotone function induced by `g`.
#[derive(Debug, Clone, Copy)]
pub struct InducedFunction {
    pub g: OperatorConvexG,
}

impl InducedFunction {
    pub fn f(&self, x: f64) -> Result<f64> {
        self.g.f(x)
    }

    pub fn c(&self, x: f64, y: f64) -> Result<f64> {
        self.g.c(x, y)
    }

    /// `Tr(A c_{f_g}(L_ρ, R_ρ)(B))`.
    pub fn metric(&self, rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
        let ev = rho.eigenvalues();
        for &x in ev {
            for &y in ev {
                self.c(x, y)?;
            }
        }
        metric_with_kernel(rho, |x, y| self.c(x, y).unwrap_or(f64::NAN), a, b)
    }
}

pub fn f_from_g(g: &OperatorConvexG) -> InducedFunction {
    InducedFunction { g: *g }
}

/// `g(Δ_{σ,ρ})(X)` for the relative modular operator `Δ_{σ,ρ}(X) = σ X ρ⁻¹`.
pub fn relative_modular_apply(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    g: impl Fn(f64) -> f64,
    x: &CMatrix,
) -> Result<CMatrix> {
    check_dims(rho.dim(), sigma.dim())?;
    check_dims(rho.dim(), x.nrows())?;
    check_dims(rho.dim(), x.ncols())?;
    let (r, s) = (rho.spectrum(), sigma.spectrum());
    let mut xt = s.unitary.adjoint() * x * &r.unitary;
    let n = rho.dim();
    for i in 0..n {
        for j in 0..n {
            let w = g(s.eigenvalues[i] / r.eigenvalues[j]);
            if !w.is_finite() {
                return Err(Error::Domain(format!(
                    "g is not finite at {}",
                    s.eigenvalues[i] / r.eigenvalues[j]
                )));
            }
            xt[(i, j)] *= w;
        }
    }
    Ok(&s.unitary * xt * r.unitary.adjoint())
}

/// Relative g-entropy `H_g(ρ, σ) = Tr(ρ^{1/2} g(Δ_{σ,ρ})(ρ^{1/2}))`.
pub fn h_g_divergence(rho: &DensityMatrix, sigma: &DensityMatrix, g: &OperatorConvexG) -> Result<f64> {
    let sqrt_rho = rho.sqrt();
    let y = relative_modular_apply(rho, sigma, g.g, sqrt_rho.as_matrix())?;
    Ok((sqrt_rho.as_matrix() * y).trace().re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HessianCheck {
    pub numeric: f64,
    pub analytic: f64,
    pub residual: f64,
    pub step: f64,
}

impl HessianCheck {
    /// `|numeric − analytic| / (1 + |analytic|)`.
    pub fn relative_residual(&self) -> f64 {
        self.residual / (1.0 + self.analytic.abs())
    }
}

pub const DEFAULT_HESSIAN_STEP: f64 = 1e-3;

fn spectral_radius(h: &HermitianMatrix) -> Result<f64> {
    let d = spectral_decompose(h)?;
    Ok(d.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// Compares `−∂²/∂t∂s H_g(ρ + tA, ρ + sB)` at 0, from a four-point stencil,
/// with `Tr(A c_{f_g}(L_ρ, R_ρ)(B))`.
pub fn hessian_check(
    g: &OperatorConvexG,
    rho: &DensityMatrix,
    a: &TangentVector,
    b: &TangentVector,
    step: f64,
) -> Result<HessianCheck> {
    check_dims(rho.dim(), a.dim())?;
    check_dims(rho.dim(), b.dim())?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    let lmin = rho.eigenvalues()[0];
    let reach = spectral_radius(a.as_hermitian())?.max(spectral_radius(b.as_hermitian())?);
    let suggested = if reach > 0.0 { 0.5 * lmin / reach } else { step };
    let shifted = |d: &TangentVector, t: f64| -> Result<DensityMatrix> {
        rho.as_hermitian()
            .lincomb(1.0, d.as_hermitian(), t)
            .and_then(DensityMatrix::new)
            .map_err(|e| match e {
                Error::NotPositive { .. } => Error::StepTooLarge { step, suggested },
                other => other,
            })
    };
    let (ap, am) = (shifted(a, step)?, shifted(a, -step)?);
    let (bp, bm) = (shifted(b, step)?, shifted(b, -step)?);
    let h = |r: &DensityMatrix, s: &DensityMatrix| h_g_divergence(r, s, g);
    let mixed = (h(&ap, &bp)? - h(&ap, &bm)? - h(&am, &bp)? + h(&am, &bm)?) / (4.0 * step * step);
    let numeric = -mixed;
    let analytic = f_from_g(g).metric(rho, a.as_hermitian(), b.as_hermitian())?;
    Ok(HessianCheck {
        numeric,
        analytic,
        residual: (numeric - analytic).abs(),
        step,
    })
}

/// `α = 3 + 2 g'''(1)/g''(1)`.
pub fn alpha_from_g(g: &OperatorConvexG) -> Result<f64> {
    if g.d2_at_1 == 0.0 {
        return Err(Error::UndefinedAlpha(g.id.to_string()));
    }
    Ok(3.0 + 2.0 * g.d3_at_1 / g.d2_at_1)
}

/// Fidelity `Tr (ρ^{1/2} σ ρ^{1/2})^{1/2}`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let s = rho.sqrt();
    let m = HermitianMatrix::from_matrix_lossy(s.as_matrix() * sigma.as_matrix() * s.as_matrix());
    let root = hermitian_function(&m, |v| v.max(0.0).sqrt())?;
    Ok(root.trace())
}

/// `d_b(ρ, σ) = √(2 − 2 Tr (ρ^{1/2} σ ρ^{1/2})^{1/2})`.
pub fn bures_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok((2.0 - 2.0 * fidelity(rho, sigma)?).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotone::{BKM, WY};
    use crate::spectral::{
        random_density, random_density_with_mixing, random_kraus_channel, random_tangent, random_unitary,
    };

    fn diag(p: &[f64]) -> DensityMatrix {
        DensityMatrix::from_diagonal(p).unwrap()
    }

    fn log_grid(points: usize) -> Vec<f64> {
        (0..points)
            .map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / (points - 1) as f64))
            .collect()
    }

    /// `Σ_ij g(μ_i/λ_j) λ_j |⟨v_i|u_j⟩|²`, evaluated without the modular operator.
    fn h_g_by_overlaps(rho: &DensityMatrix, sigma: &DensityMatrix, g: fn(f64) -> f64) -> f64 {
        let (r, s) = (rho.spectrum(), sigma.spectrum());
        let ov = s.unitary.adjoint() * &r.unitary;
        let mut acc = 0.0;
        for i in 0..rho.dim() {
            for j in 0..rho.dim() {
                let (mu, la) = (s.eigenvalues[i], r.eigenvalues[j]);
                acc += g(mu / la) * la * ov[(i, j)].norm_sqr();
            }
        }
        acc
    }

    #[test]
    fn catalog_g_invariants() {
        for g in g_catalog() {
            assert!((g.g)(1.0).abs() < 1e-12);
            let grid = log_grid(60);
            for &x in &grid {
                for &y in &grid {
                    let mid = (g.g)(0.5 * (x + y));
                    assert!(mid <= 0.5 * ((g.g)(x) + (g.g)(y)) + 1e-12);
                }
            }
            // derivative constants against central differences
            let h = 1e-3;
            let d2 = ((g.g)(1.0 + h) - 2.0 * (g.g)(1.0) + (g.g)(1.0 - h)) / (h * h);
            let d3 = ((g.g)(1.0 + 2.0 * h) - 2.0 * (g.g)(1.0 + h) + 2.0 * (g.g)(1.0 - h)
                - (g.g)(1.0 - 2.0 * h))
                / (2.0 * h * h * h);
            assert!((d2 - g.d2_at_1).abs() < 1e-5, "{}", g.id);
            assert!((d3 - g.d3_at_1).abs() < 1e-4, "{}", g.id);
        }
    }

    #[test]
    fn lookup_accepts_short_names() {
        assert_eq!(lookup_g("wy").unwrap().id, "g_wy");
        assert_eq!(lookup_g("g_umegaki").unwrap().id, "g_umegaki");
        let err = lookup_g("renyi").unwrap_err().to_string();
        assert!(err.contains("g_wy") && err.contains("g_umegaki"));
    }

    #[test]
    fn induced_functions_match_catalog() {
        let mut grid = log_grid(100);
        grid.extend([1.0, 1.0 + 1e-9, 1.0 - 5e-5, 1.0 + 9.9e-5, 1.0 + 1.01e-4, 0.9999]);
        for &x in &grid {
            let wy = G_WY.f(x).unwrap();
            assert!((wy - (WY.f)(x)).abs() <= 1e-12 * (WY.f)(x), "{x}");
            let bkm = G_UMEGAKI.f(x).unwrap();
            assert!((bkm - (BKM.f)(x)).abs() <= 1e-12 * (BKM.f)(x), "{x}");
        }
        assert_eq!(G_WY.f(1.0).unwrap(), 1.0);
    }

    #[test]
    fn generic_f_from_g_path() {
        // a fixture with no closed-form symmetric sum
        let g = OperatorConvexG {
            symmetric_sum: None,
            ..G_WY
        };
        for &x in &log_grid(50) {
            let v = g.f(x).unwrap();
            assert!((v - (WY.f)(x)).abs() <= 1e-8 * (WY.f)(x), "{x}");
        }
        // g ≡ 0 has no induced function
        let zero = OperatorConvexG {
            id: "zero",
            g: |_| 0.0,
            d2_at_1: 1.0,
            d3_at_1: 0.0,
            d4_at_1: 0.0,
            symmetric_sum: None,
        };
        assert!(matches!(zero.f(2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn modular_operator_examples() {
        let rho = random_density(3, 1);
        let sigma = random_density(3, 2);
        let s = rho.sqrt();
        let got = relative_modular_apply(&rho, &sigma, |x| x - 1.0, s.as_matrix()).unwrap();
        let inv_sqrt = crate::spectral::matrix_function(&rho, |x| 1.0 / x.sqrt()).unwrap();
        let expect = sigma.as_matrix() * inv_sqrt.as_matrix() - s.as_matrix();
        assert!((got - expect).norm() < 1e-12);

        let same = relative_modular_apply(&rho, &rho, |x| x.ln(), &rho.as_matrix().clone()).unwrap();
        assert!(same.norm() < 1e-12);

        let x = random_hermitian_c(3, 5);
        let y = random_hermitian_c(3, 6);
        let two = num_complex::Complex64::new(2.0, 0.0);
        let lhs = relative_modular_apply(&rho, &sigma, g_wy, &(&x * two + &y)).unwrap();
        let rhs = relative_modular_apply(&rho, &sigma, g_wy, &x).unwrap() * two
            + relative_modular_apply(&rho, &sigma, g_wy, &y).unwrap();
        assert!((lhs - rhs).norm() < 1e-11);
    }

    fn random_hermitian_c(n: usize, seed: u64) -> CMatrix {
        crate::spectral::random_hermitian(n, seed).into_matrix()
    }

    #[test]
    fn wy_divergence_closed_form() {
        for seed in 0..20 {
            let rho = random_density(3, seed);
            let sigma = random_density(3, seed + 100);
            let h = h_g_divergence(&rho, &sigma, &G_WY).unwrap();
            let overlap = (rho.sqrt().as_matrix() * sigma.sqrt().as_matrix()).trace().re;
            assert!((h - 4.0 * (1.0 - overlap)).abs() < 1e-11);
            assert!((h - h_g_by_overlaps(&rho, &sigma, g_wy)).abs() < 1e-11);
            assert!(h >= 0.0);
        }
    }

    #[test]
    fn umegaki_is_relative_entropy() {
        for seed in 0..20 {
            let rho = random_density(4, seed);
            let sigma = random_density(4, seed + 50);
            let h = h_g_divergence(&rho, &sigma, &G_UMEGAKI).unwrap();
            let lr = crate::spectral::matrix_function(&rho, f64::ln).unwrap();
            let ls = crate::spectral::matrix_function(&sigma, f64::ln).unwrap();
            let expect = (rho.as_matrix() * (lr.as_matrix() - ls.as_matrix())).trace().re;
            assert!((h - expect).abs() < 1e-11, "{h} {expect}");
            assert!(h >= 0.0);
        }
        let p: [f64; 3] = [0.5, 0.3, 0.2];
        let q: [f64; 3] = [0.2, 0.2, 0.6];
        let kl: f64 = p.iter().zip(&q).map(|(a, b)| a * (a / b).ln()).sum();
        let h = h_g_divergence(&diag(&p), &diag(&q), &G_UMEGAKI).unwrap();
        assert!((h - kl).abs() < 1e-11);
    }

    #[test]
    fn diagonal_pairs_reduce_to_classical() {
        let p = [0.1, 0.25, 0.65];
        let q = [0.4, 0.35, 0.25];
        for g in g_catalog() {
            let classical: f64 = p.iter().zip(&q).map(|(a, b)| a * (g.g)(b / a)).sum();
            let h = h_g_divergence(&diag(&p), &diag(&q), &g).unwrap();
            assert!((h - classical).abs() < 1e-11, "{}", g.id);
            let rho = diag(&p);
            assert!(h_g_divergence(&rho, &rho, &g).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn data_processing_inequality() {
        for g in g_catalog() {
            for trial in 0..200u64 {
                let n = 2 + (trial % 2) as usize;
                let env = 1 + (trial as usize % 3);
                let t = random_kraus_channel(n, n, env, trial).unwrap();
                let rho = random_density(n, trial + 1000);
                let sigma = random_density(n, trial + 2000);
                let before = h_g_divergence(&rho, &sigma, &g).unwrap();
                let (tr, ts) = (t.apply_density(&rho).unwrap(), t.apply_density(&sigma).unwrap());
                let after = h_g_divergence(&tr, &ts, &g).unwrap();
                assert!(
                    after <= before + 1e-9,
                    "{} trial {trial}: {after} > {before}",
                    g.id
                );
            }
        }
    }

    #[test]
    fn hessian_matches_induced_metric() {
        for g in g_catalog() {
            for seed in 0..10 {
                let n = 2 + (seed % 3) as usize;
                let rho = random_density_with_mixing(n, seed, 5e-2 * n as f64);
                let a = random_tangent(n, seed + 1).normalized();
                let b = random_tangent(n, seed + 2).normalized();
                let r = hessian_check(&g, &rho, &a, &b, DEFAULT_HESSIAN_STEP).unwrap();
                assert!(r.residual <= 1e-4 * (1.0 + r.analytic.abs()), "{} {r:?}", g.id);
            }
        }
        let rho = random_density(2, 3);
        let z = TangentVector::zeros(2);
        let r = hessian_check(&G_WY, &rho, &z, &z, 1e-3).unwrap();
        assert_eq!((r.numeric, r.analytic), (0.0, 0.0));
    }

    #[test]
    fn hessian_step_halving_is_second_order() {
        let rho = random_density_with_mixing(3, 11, 0.15);
        let a = random_tangent(3, 12).normalized();
        let b = random_tangent(3, 13).normalized();
        let r1 = hessian_check(&G_WY, &rho, &a, &b, 2e-2).unwrap().residual;
        let r2 = hessian_check(&G_WY, &rho, &a, &b, 1e-2).unwrap().residual;
        let ratio = r1 / r2;
        assert!((3.0..5.0).contains(&ratio), "{r1} {r2} {ratio}");
    }

    #[test]
    fn wy_hessian_is_wy_metric() {
        let rho = random_density_with_mixing(3, 4, 0.15);
        let a = random_tangent(3, 5);
        let b = random_tangent(3, 6);
        let induced = f_from_g(&G_WY)
            .metric(&rho, a.as_hermitian(), b.as_hermitian())
            .unwrap();
        let wy = crate::monotone::metric_eval(&WY, &rho, &a, &b).unwrap().value;
        assert!((induced - wy).abs() < 1e-11 * (1.0 + wy.abs()));
    }

    #[test]
    fn hessian_rejects_large_steps() {
        let rho = diag(&[0.98, 0.02]);
        let a = TangentVector::new(HermitianMatrix::pauli_z()).unwrap();
        match hessian_check(&G_WY, &rho, &a, &a, 0.1) {
            Err(Error::StepTooLarge { step, suggested }) => {
                assert_eq!(step, 0.1);
                assert!(suggested < 0.02);
                assert!(hessian_check(&G_WY, &rho, &a, &a, suggested).is_ok());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha_from_g(&G_WY).unwrap(), 0.0);
        assert_eq!(alpha_from_g(&G_UMEGAKI).unwrap(), -1.0);
        let flat = OperatorConvexG { d3_at_1: 0.0, ..G_WY };
        assert_eq!(alpha_from_g(&flat).unwrap(), 3.0);
        let degenerate = OperatorConvexG { d2_at_1: 0.0, ..G_WY };
        assert!(matches!(alpha_from_g(&degenerate), Err(Error::UndefinedAlpha(_))));
    }

    #[test]
    fn bures_examples() {
        let rho = diag(&[0.9, 0.1]);
        let sigma = diag(&[0.1, 0.9]);
        assert!((bures_distance(&rho, &sigma).unwrap() - 0.8f64.sqrt()).abs() < 1e-12);
        assert!(bures_distance(&rho, &rho).unwrap() < 1e-7);
        for seed in 0..100 {
            let a = random_density(3, seed);
            let b = random_density(3, seed + 500);
            let d1 = bures_distance(&a, &b).unwrap();
            let d2 = bures_distance(&b, &a).unwrap();
            assert!((d1 - d2).abs() < 1e-10);
            let u = random_unitary(3, seed);
            let d3 = bures_distance(&a.conjugate_by(&u).unwrap(), &b.conjugate_by(&u).unwrap()).unwrap();
            assert!((d1 - d3).abs() < 1e-10);
        }
    }
}
