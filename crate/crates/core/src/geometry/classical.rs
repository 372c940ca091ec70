//! Fisher-Rao geometry of the open probability simplex.

use serde::Serialize;

use super::audited_arccos;
use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// A strictly positive probability vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityVector {
    p: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument("empty probability vector".into()));
        }
        if let Some(v) = p.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Invariant(format!("strict positivity (entry = {v})")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::Invariant(format!("unit sum (sum = {sum})")));
        }
        Ok(Self { p })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            p: vec![1.0 / n as f64; n],
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// `Σ p_i s_i`.
    pub fn expectation(&self, s: &[f64]) -> f64 {
        self.p.iter().zip(s).map(|(p, s)| p * s).sum()
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

fn check_tangent(u: &[f64]) -> Result<()> {
    let s: f64 = u.iter().sum();
    let scale = u.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    if s.abs() > SUM_TOL * scale {
        return Err(Error::Invariant(format!(
            "zero sum of tangent entries (sum = {s:e})"
        )));
    }
    Ok(())
}

/// A centered score `s` at `base`, i.e. `Σ p_i s_i = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreVector {
    s: Vec<f64>,
    base: ProbabilityVector,
}

impl ScoreVector {
    pub fn new(s: Vec<f64>, base: ProbabilityVector) -> Result<Self> {
        check_len(base.len(), s.len())?;
        let mean = base.expectation(&s);
        let scale = s.iter().map(|v| v.abs()).fold(1.0_f64, f64::max);
        if mean.abs() > SUM_TOL * scale {
            return Err(Error::Invariant(format!("centered score (mean = {mean:e})")));
        }
        Ok(Self { s, base })
    }

    /// Score `u_i / p_i` of a tangent vector `u`.
    pub fn from_tangent(u: &[f64], base: &ProbabilityVector) -> Result<Self> {
        check_len(base.len(), u.len())?;
        check_tangent(u)?;
        let s = u.iter().zip(base.as_slice()).map(|(u, p)| u / p).collect();
        Ok(Self {
            s,
            base: base.clone(),
        })
    }

    /// Tangent vector `p_i s_i`.
    pub fn to_tangent(&self) -> Vec<f64> {
        self.s
            .iter()
            .zip(self.base.as_slice())
            .map(|(s, p)| s * p)
            .collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.s
    }

    pub fn base(&self) -> &ProbabilityVector {
        &self.base
    }
}

/// `⟨u, v⟩_p = Σ u_i v_i / p_i`.
pub fn fisher_rao_metric(p: &ProbabilityVector, u: &[f64], v: &[f64]) -> Result<f64> {
    check_len(p.len(), u.len())?;
    check_len(p.len(), v.len())?;
    check_tangent(u)?;
    check_tangent(v)?;
    Ok(p.as_slice()
        .iter()
        .zip(u.iter().zip(v))
        .map(|(p, (u, v))| u * v / p)
        .sum())
}

/// Fisher-Rao inner product in score form, `Σ p_i s_i t_i`.
pub fn score_inner(a: &ScoreVector, b: &ScoreVector) -> Result<f64> {
    if a.base != b.base {
        return Err(Error::InvalidArgument(
            "scores live at different base points".into(),
        ));
    }
    Ok(a.base
        .as_slice()
        .iter()
        .zip(a.s.iter().zip(&b.s))
        .map(|(p, (s, t))| p * s * t)
        .sum())
}

/// `2 arccos Σ √(p_i q_i)`.
pub fn bhattacharyya_distance(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<f64> {
    check_len(p.len(), q.len())?;
    let overlap: f64 = p
        .as_slice()
        .iter()
        .zip(q.as_slice())
        .map(|(a, b)| (a * b).sqrt())
        .sum();
    audited_arccos(overlap, 2.0).map(|d| d.distance)
}

/// Point at parameter `t` on the Fisher-Rao geodesic from `p` to `q`.
pub fn classical_geodesic(p: &ProbabilityVector, q: &ProbabilityVector, t: f64) -> Result<ProbabilityVector> {
    check_len(p.len(), q.len())?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "path parameter {t} is outside [0, 1]"
        )));
    }
    let m: Vec<f64> = p
        .as_slice()
        .iter()
        .zip(q.as_slice())
        .map(|(a, b)| ((1.0 - t) * a.sqrt() + t * b.sqrt()).powi(2))
        .collect();
    let total: f64 = m.iter().sum();
    ProbabilityVector::new(m.into_iter().map(|v| v / total).collect())
}

/// `p ↦ 2(√p_1, …, √p_n)`, onto the radius-2 sphere.
pub fn simplex_sphere_map(p: &ProbabilityVector) -> Vec<f64> {
    p.as_slice().iter().map(|v| 2.0 * v.sqrt()).collect()
}

/// Differential of [`simplex_sphere_map`]: `u_i / √p_i`.
pub fn sphere_map_differential(p: &ProbabilityVector, u: &[f64]) -> Result<Vec<f64>> {
    check_len(p.len(), u.len())?;
    Ok(p.as_slice().iter().zip(u).map(|(p, u)| u / p.sqrt()).collect())
}

/// Euclidean inner product of the sphere-map images of `u` and `v`.
pub fn sphere_pullback_metric(p: &ProbabilityVector, u: &[f64], v: &[f64]) -> Result<f64> {
    let du = sphere_map_differential(p, u)?;
    let dv = sphere_map_differential(p, v)?;
    Ok(du.iter().zip(&dv).map(|(a, b)| a * b).sum())
}

/// Mixture transport `s ↦ (p/q) s` of a score from `p` to `q`.
pub fn mixture_transport(s: &ScoreVector, to: &ProbabilityVector) -> Result<ScoreVector> {
    check_len(to.len(), s.s.len())?;
    let moved =
        s.s.iter()
            .zip(s.base.as_slice().iter().zip(to.as_slice()))
            .map(|(s, (p, q))| p / q * s)
            .collect();
    ScoreVector::new(moved, to.clone())
}

/// Exponential transport `s ↦ s − E_q[s]`.
pub fn exponential_transport(s: &ScoreVector, to: &ProbabilityVector) -> Result<ScoreVector> {
    check_len(to.len(), s.s.len())?;
    let mean = to.expectation(&s.s);
    ScoreVector::new(s.s.iter().map(|v| v - mean).collect(), to.clone())
}

/// Fisher-Rao scalar curvature `(n−1)(n−2)/4` of the `n`-point simplex.
pub fn classical_scalar_curvature(n: usize) -> f64 {
    let m = n as f64;
    0.25 * (m - 1.0) * (m - 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::Rng;

    fn random_pv(n: usize, seed: u64) -> ProbabilityVector {
        let mut rng = crate::spectral::seeded_rng(seed);
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let s: f64 = raw.iter().sum();
        ProbabilityVector::new(raw.iter().map(|v| v / s).collect()).unwrap()
    }

    fn random_tangent(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = crate::spectral::seeded_rng(seed);
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mean = raw.iter().sum::<f64>() / n as f64;
        raw.iter().map(|v| v - mean).collect()
    }

    #[test]
    fn validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        let e = ProbabilityVector::new(vec![1.0, 0.0]).unwrap_err();
        assert!(e.to_string().contains("strict positivity"));
        let e = ProbabilityVector::new(vec![0.5, 0.6]).unwrap_err();
        assert!(e.to_string().contains("unit sum"));
        let p = ProbabilityVector::uniform(2);
        assert!(ScoreVector::new(vec![1.0, 1.0], p.clone()).is_err());
        assert!(fisher_rao_metric(&p, &[1.0, 0.0], &[1.0, -1.0]).is_err());
    }

    #[test]
    fn distance_examples() {
        let u = ProbabilityVector::uniform(3);
        assert_eq!(bhattacharyya_distance(&u, &u).unwrap(), 0.0);
        let p = ProbabilityVector::new(vec![0.9, 0.1]).unwrap();
        let q = ProbabilityVector::new(vec![0.1, 0.9]).unwrap();
        assert!((bhattacharyya_distance(&p, &q).unwrap() - 2.0 * 0.6f64.acos()).abs() < 1e-14);
    }

    #[test]
    fn geodesic_endpoints() {
        let p = random_pv(4, 1);
        let q = random_pv(4, 2);
        let a = classical_geodesic(&p, &q, 0.0).unwrap();
        let b = classical_geodesic(&p, &q, 1.0).unwrap();
        for i in 0..4 {
            assert!((a.as_slice()[i] - p.as_slice()[i]).abs() < 1e-15);
            assert!((b.as_slice()[i] - q.as_slice()[i]).abs() < 1e-15);
        }
        // midpoint is equidistant
        let m = classical_geodesic(&p, &q, 0.5).unwrap();
        let d1 = bhattacharyya_distance(&p, &m).unwrap();
        let d2 = bhattacharyya_distance(&m, &q).unwrap();
        assert!((d1 - d2).abs() < 1e-12);
        assert!((d1 + d2 - bhattacharyya_distance(&p, &q).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn sphere_map_lands_on_radius_two() {
        let p = random_pv(5, 3);
        let x = simplex_sphere_map(&p);
        assert!((x.iter().map(|v| v * v).sum::<f64>() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_differential_against_complex_step() {
        let p = random_pv(4, 4);
        let u = random_tangent(4, 5);
        let h = 1e-30;
        let step: Vec<f64> = p
            .as_slice()
            .iter()
            .zip(&u)
            .map(|(p, u)| (Complex64::new(*p, h * u).sqrt() * 2.0).im / h)
            .collect();
        let d = sphere_map_differential(&p, &u).unwrap();
        for (a, b) in step.iter().zip(&d) {
            assert!((a - b).abs() < 1e-14 * b.abs().max(1.0));
        }
    }

    #[test]
    fn pullback_is_fisher_rao() {
        for seed in 0..50 {
            let p = random_pv(5, seed);
            let u = random_tangent(5, seed + 100);
            let v = random_tangent(5, seed + 200);
            let fr = fisher_rao_metric(&p, &u, &v).unwrap();
            let pb = sphere_pullback_metric(&p, &u, &v).unwrap();
            assert!((fr - pb).abs() < 1e-12 * fr.abs().max(1.0));
        }
    }

    #[test]
    fn score_conversion_round_trip() {
        let p = random_pv(4, 7);
        let u = random_tangent(4, 8);
        let s = ScoreVector::from_tangent(&u, &p).unwrap();
        for (a, b) in s.to_tangent().iter().zip(&u) {
            assert!((a - b).abs() < 1e-15);
        }
        let t = ScoreVector::from_tangent(&random_tangent(4, 9), &p).unwrap();
        let v = t.to_tangent();
        assert!((score_inner(&s, &t).unwrap() - fisher_rao_metric(&p, &u, &v).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn transports_are_dual() {
        for seed in 0..100 {
            let p = random_pv(4, seed);
            let q = random_pv(4, seed + 1000);
            let s = ScoreVector::from_tangent(&random_tangent(4, seed + 1), &p).unwrap();
            let t = ScoreVector::from_tangent(&random_tangent(4, seed + 2), &p).unwrap();
            let lhs = score_inner(
                &mixture_transport(&s, &q).unwrap(),
                &exponential_transport(&t, &q).unwrap(),
            )
            .unwrap();
            let rhs = score_inner(&s, &t).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "{lhs} {rhs}");
        }
    }

    #[test]
    fn curvature_constant() {
        assert_eq!(classical_scalar_curvature(3), 0.5);
        assert_eq!(classical_scalar_curvature(2), 0.0);
    }
}
