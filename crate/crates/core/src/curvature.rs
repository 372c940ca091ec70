//! Scalar curvature of a monotone metric from the spectrum of `ρ`.
//!
//! With `c = c_f` and `(log c)'` the derivative in the first slot,
//!
//! ```text
//! h1(x,y,z) = (c(x,y) − z c(x,z) c(y,z)) / ((x−z)(y−z) c(x,z) c(y,z))
//! h2(x,y,z) = (c(x,z) − c(y,z))² / ((x−y)² c(x,y) c(x,z) c(y,z))
//! h3(x,y,z) = z ((log c)'(z,x) − (log c)'(z,y)) / (x−y)
//! h4(x,y,z) = z (log c)'(z,x) (log c)'(z,y)
//! h         = h1 − h2/2 + 2 h3 − h4
//! ```
//!
//! and the curvature of the positive cone is
//! `Scal(ρ) = Σ_{x,y,z} h(x,y,z) − Σ_x h(x,x,x)`, summed over the eigenvalue
//! list with multiplicity. The unit-trace slice adds `(n²−1)(n²−2)/4`.
//!
//! The quotients have removable singularities where arguments coincide.
//! Near such points the h-values are taken as the Richardson limit of
//! evaluations at slightly spread-apart arguments.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monotone::MonotoneFunctionEntry;
use crate::spectral::DensityMatrix;

/// The four auxiliary functions and their combination `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HValues {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
    pub h: f64,
}

impl HValues {
    fn assemble(h1: f64, h2: f64, h3: f64, h4: f64) -> Self {
        Self {
            h1,
            h2,
            h3,
            h4,
            h: h1 - 0.5 * h2 + 2.0 * h3 - h4,
        }
    }

    fn combine(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        Self::assemble(
            wa * a.h1 + wb * b.h1,
            wa * a.h2 + wb * b.h2,
            wa * a.h3 + wb * b.h3,
            wa * a.h4 + wb * b.h4,
        )
    }

    fn is_finite(&self) -> bool {
        [self.h1, self.h2, self.h3, self.h4].iter().all(|v| v.is_finite())
    }
}

/// Pairs closer than this relative gap are treated as coincident.
pub const COINCIDENCE_GAP: f64 = 1e-4;
/// Largest relative spread used when extrapolating to coinciding arguments.
pub const JITTER: f64 = 1.6e-2;

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.max(b)
}

fn h_direct(entry: &MonotoneFunctionEntry, x: f64, y: f64, z: f64) -> HValues {
    let c = entry.c;
    let (cxy, cxz, cyz) = (c(x, y), c(x, z), c(y, z));
    let h1 = (cxy - z * cxz * cyz) / ((x - z) * (y - z) * cxz * cyz);
    let h2 = (cxz - cyz).powi(2) / ((x - y).powi(2) * cxy * cxz * cyz);
    let (lzx, lzy) = (entry.log_c_dx(z, x), entry.log_c_dx(z, y));
    let h3 = z * (lzx - lzy) / (x - y);
    let h4 = z * lzx * lzy;
    HValues::assemble(h1, h2, h3, h4)
}

/// Spreads the sorted arguments apart by `v(1 ± d)`, so no pair can cross.
fn spread(entry: &MonotoneFunctionEntry, x: f64, y: f64, z: f64, d: f64) -> HValues {
    let mut v = [(x, 0usize), (y, 1), (z, 2)];
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut p = [0.0; 3];
    for (rank, (val, slot)) in v.into_iter().enumerate() {
        p[slot] = val * (1.0 + d * (rank as f64 - 1.0));
    }
    h_direct(entry, p[0], p[1], p[2])
}

/// Four spread levels `d, d/2, d/4, d/8` and three Richardson eliminations.
fn h_limit(entry: &MonotoneFunctionEntry, x: f64, y: f64, z: f64) -> HValues {
    let mut table: Vec<HValues> = (0..4)
        .map(|k| spread(entry, x, y, z, JITTER / f64::from(1u32 << k)))
        .collect();
    for j in 1..4 {
        let w = f64::from(1u32 << j);
        table = table
            .windows(2)
            .map(|pair| HValues::combine(&pair[1], w / (w - 1.0), &pair[0], -1.0 / (w - 1.0)))
            .collect();
    }
    table[0]
}

/// Evaluates `h1 … h4` and `h` at `(x, y, z)`, including coinciding arguments.
pub fn h_funcs(entry: &MonotoneFunctionEntry, x: f64, y: f64, z: f64) -> Result<HValues> {
    for v in [x, y, z] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!(
                "auxiliary functions need positive arguments, got {v}"
            )));
        }
    }
    let near =
        rel_gap(x, y) < COINCIDENCE_GAP || rel_gap(x, z) < COINCIDENCE_GAP || rel_gap(y, z) < COINCIDENCE_GAP;
    let h = if near {
        h_limit(entry, x, y, z)
    } else {
        h_direct(entry, x, y, z)
    };
    if h.is_finite() {
        Ok(h)
    } else {
        Err(Error::Domain(format!(
            "`{}` kernel or its derivative is not finite near ({x}, {y}, {z})",
            entry.id
        )))
    }
}

/// Closed forms of `h1 … h4` for `c(x, y) = 4/(√x + √y)²`.
pub fn wy_h_closed_forms(x: f64, y: f64, z: f64) -> HValues {
    let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
    let (pxy, pxz, pyz) = (sx + sy, sx + sz, sy + sz);
    let h1 = (sx * sy + 3.0 * sx * sz + 3.0 * sy * sz + z) / (4.0 * pxy * pxy * pxz * pyz);
    let h2 = (sx + sy + 2.0 * sz).powi(2) / (4.0 * pxz * pxz * pyz * pyz);
    let h3 = sz / (pxy * pxz * pyz);
    let h4 = 1.0 / (pxz * pyz);
    HValues::assemble(h1, h2, h3, h4)
}

/// Average of `f` over the six permutations of its arguments.
pub fn symmetrized(f: impl Fn(f64, f64, f64) -> f64, x: f64, y: f64, z: f64) -> f64 {
    (f(x, y, z) + f(x, z, y) + f(y, x, z) + f(y, z, x) + f(z, x, y) + f(z, y, x)) / 6.0
}

/// `(n² − 1)(n² − 2)/4`, the difference between the curvature of the
/// unit-trace slice and that of the positive cone.
pub fn unit_trace_correction(n: usize) -> f64 {
    let m = (n * n) as f64;
    0.25 * (m - 1.0) * (m - 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub function_id: String,
    pub n: usize,
    /// Curvature of the positive cone.
    pub scal: f64,
    /// Curvature of the unit-trace states.
    pub scal1: f64,
    pub spectrum: Vec<f64>,
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Curvature from an explicit eigenvalue list (with multiplicity).
pub fn scalar_curvature_of_spectrum(
    entry: &MonotoneFunctionEntry,
    spectrum: &[f64],
) -> Result<CurvatureReport> {
    let n = spectrum.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    // Index triples (i, i, i) appear once in the triple sum and once in the
    // subtracted diagonal sum, so they cancel exactly and are skipped.
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::with_capacity(n * n);
            for j in 0..n {
                for k in 0..n {
                    if i == j && j == k {
                        continue;
                    }
                    out.push(h_funcs(entry, spectrum[i], spectrum[j], spectrum[k])?.h);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let terms: Vec<f64> = rows.into_iter().flatten().collect();
    let scal = pairwise_sum(&terms);
    Ok(CurvatureReport {
        function_id: entry.id.to_string(),
        n,
        scal,
        scal1: scal + unit_trace_correction(n),
        spectrum: spectrum.to_vec(),
    })
}

pub fn scalar_curvature(entry: &MonotoneFunctionEntry, rho: &DensityMatrix) -> Result<CurvatureReport> {
    scalar_curvature_of_spectrum(entry, rho.eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotone::{catalog, BKM, SLD, WY};
    use crate::spectral::{random_density, random_unitary};
    use rand::Rng;

    #[test]
    fn wy_closed_forms_at_one() {
        let h = wy_h_closed_forms(1.0, 1.0, 1.0);
        assert_eq!(h.h1, 0.125);
        assert_eq!(h.h2, 0.25);
        assert_eq!(h.h3, 0.125);
        assert_eq!(h.h4, 0.25);
        assert_eq!(h.h, 0.0);
    }

    #[test]
    fn generic_h_at_coincidence_matches_closed_form() {
        let g = h_funcs(&WY, 1.0, 1.0, 1.0).unwrap();
        assert!((g.h3 - 0.125).abs() < 1e-10);
        assert!((g.h4 - 0.25).abs() < 1e-10);
        assert!((g.h1 - 0.125).abs() < 1e-10);
    }

    #[test]
    fn wy_h2_generic_point() {
        let g = h_funcs(&WY, 4.0, 1.0, 1.0).unwrap();
        let expect = 25.0 / 144.0;
        assert!((wy_h_closed_forms(4.0, 1.0, 1.0).h2 - expect).abs() < 1e-15);
        assert!((g.h2 - expect).abs() < 1e-10);
    }

    #[test]
    fn generic_engine_matches_wy_closed_forms() {
        let mut rng = crate::spectral::seeded_rng(42);
        for _ in 0..1000 {
            let (x, y, z) = (
                rng.random_range(1e-3..1.0),
                rng.random_range(1e-3..1.0),
                rng.random_range(1e-3..1.0),
            );
            let g = h_funcs(&WY, x, y, z).unwrap();
            let w = wy_h_closed_forms(x, y, z);
            for (a, b) in [(g.h1, w.h1), (g.h2, w.h2), (g.h3, w.h3), (g.h4, w.h4)] {
                assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "({x},{y},{z}) {a} {b}");
            }
        }
    }

    #[test]
    fn generic_engine_near_coincidence() {
        // every coincidence pattern, exact and near, at widely different scales
        for &base in &[2.5e-4, 0.013, 0.4, 0.97] {
            for &eps in &[0.0, 1e-12, 1e-9, 1e-6, 5e-5, 2e-4, 1e-3] {
                let p = base * (1.0 + eps);
                let far = base * 3.1;
                for (x, y, z) in [
                    (base, p, far),
                    (base, far, p),
                    (far, base, p),
                    (base, p, base),
                    (p, base, base),
                    (base, base, p),
                ] {
                    let g = h_funcs(&WY, x, y, z).unwrap();
                    let w = wy_h_closed_forms(x, y, z);
                    let scale = 1.0 / base;
                    assert!((g.h - w.h).abs() <= 1e-9 * scale, "({x},{y},{z}) {} {}", g.h, w.h);
                    assert!((g.h1 - w.h1).abs() <= 1e-9 * scale, "h1 ({x},{y},{z})");
                }
            }
        }
    }

    #[test]
    fn wy_symmetrized_parts_vanish() {
        let mut rng = crate::spectral::seeded_rng(5);
        for _ in 0..200 {
            let (x, y, z) = (
                rng.random_range(1e-3..1.0),
                rng.random_range(1e-3..1.0),
                rng.random_range(1e-3..1.0),
            );
            let a = symmetrized(
                |x, y, z| {
                    let h = wy_h_closed_forms(x, y, z);
                    h.h1 - 0.5 * h.h2
                },
                x,
                y,
                z,
            );
            let b = symmetrized(
                |x, y, z| {
                    let h = wy_h_closed_forms(x, y, z);
                    2.0 * h.h3 - h.h4
                },
                x,
                y,
                z,
            );
            let scale = 1.0 / x.min(y).min(z);
            assert!(a.abs() < 1e-12 * scale && b.abs() < 1e-12 * scale);
            let g = symmetrized(|x, y, z| h_funcs(&WY, x, y, z).unwrap().h, x, y, z);
            assert!(g.abs() < 1e-10 * scale);
        }
    }

    #[test]
    fn h_funcs_rejects_nonpositive() {
        assert!(matches!(h_funcs(&WY, 0.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(h_funcs(&WY, 1.0, -1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn wy_constant_curvature_small_dims() {
        for (n, expect) in [(2, 1.5), (3, 14.0), (4, 52.5)] {
            assert_eq!(unit_trace_correction(n), expect);
            for seed in 0..5 {
                let r = scalar_curvature(&WY, &random_density(n, seed)).unwrap();
                assert!(r.scal.abs() < 1e-6 * expect, "{r:?}");
                assert!((r.scal1 - expect).abs() < 1e-6 * expect);
                assert_eq!(r.scal1, r.scal + unit_trace_correction(n));
            }
        }
    }

    #[test]
    fn curvature_is_unitarily_invariant() {
        for seed in 0..5 {
            let rho = random_density(3, seed);
            let u = random_unitary(3, seed + 9);
            let rot = rho.conjugate_by(&u).unwrap();
            for e in catalog() {
                let a = scalar_curvature(&e, &rho).unwrap().scal;
                let b = scalar_curvature(&e, &rot).unwrap().scal;
                assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()), "{} {a} {b}", e.id);
            }
        }
    }

    #[test]
    fn multiplicity_convention_is_continuous() {
        // Scal(ρ_ε) must approach Scal(I/n) as ρ_ε collapses onto I/n. The
        // list convention passes; dropping repeated eigenvalues would not.
        for e in [BKM, SLD, WY] {
            for n in [2, 3] {
                let at_center = scalar_curvature(&e, &DensityMatrix::maximally_mixed(n))
                    .unwrap()
                    .scal;
                let rho = random_density(n, 3);
                let resid = |eps: f64| {
                    let r = rho.mix_with_identity(1.0 - eps).unwrap();
                    (scalar_curvature(&e, &r).unwrap().scal - at_center).abs()
                };
                let (r2, r4) = (resid(1e-2), resid(1e-4));
                assert!(r4 < r2 || r2 < 1e-7, "{} n={n}: {r2} {r4}", e.id);
                assert!(r4 < 1e-3 * (1.0 + at_center.abs()), "{} n={n}: {r4}", e.id);
            }
        }
    }
}
