//! Hermitian linear algebra on desk-scale dense matrices.
//!
//! Everything in the crate is built from three operations on a spectral
//! decomposition `H = U diag(λ) U†`:
//!
//! | Operation | Eigenbasis action |
//! |-----------|-------------------|
//! | [`matrix_function`] | `λ_i ↦ φ(λ_i)` |
//! | [`apply_kernel_superop`] | `X̃_ij ↦ k(λ_i, λ_j) X̃_ij` |
//! | [`tangent_split`] | block-diagonal part and `X̃_ij / (i(λ_i − λ_j))` off the blocks |
//!
//! The kernel superoperator is how `c(L_ρ, R_ρ)` is realised for a two
//! variable function `c`: left and right multiplication by `ρ` commute and are
//! simultaneously diagonal on the matrix units `|u_i⟩⟨u_j|`.

mod channel;
mod json;
mod random;

pub use channel::{apply_channel, KrausChannel};
pub use json::MatrixJson;
pub use random::{
    derive_seed, random_density, random_density_with_mixing, random_hermitian, random_kraus_channel,
    random_tangent, random_unitary, seeded_rng, DENSITY_FLOOR_MIXING,
};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

pub(crate) const HERMITIAN_TOL: f64 = 1e-12;
pub(crate) const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues closer than this (relative to `max(1, λ_max)`) share a block.
pub const DEGENERACY_GAP: f64 = 1e-8;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entrywise `|a_ij − conj(a_ji)|`.
pub fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// A square matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    /// Validates squareness and hermiticity to within `1e-12`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let asym = max_asymmetry(&m);
        if asym.is_nan() || asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian { max_asymmetry: asym });
        }
        Ok(Self {
            m: hermitian_part(&m),
        })
    }

    /// Projects an arbitrary square matrix onto its Hermitian part `(M + M†)/2`.
    ///
    /// Used for results that are Hermitian in exact arithmetic.
    pub fn from_matrix_lossy(m: CMatrix) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self {
            m: hermitian_part(&m),
        }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            m: CMatrix::from_fn(n, n, |i, j| if i == j { c(d[i], 0.0) } else { c(0.0, 0.0) }),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: CMatrix::zeros(n, n),
        }
    }

    /// Builds a matrix from real and imaginary row-major parts.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let n = re.len();
        if im.len() != n || re.iter().chain(im.iter()).any(|row| row.len() != n) {
            return Err(Error::Parse(format!("`re` and `im` must both be {n}x{n} arrays")));
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| c(re[i][j], im[i][j])))
    }

    pub fn pauli_x() -> Self {
        Self::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ))
        .expect("pauli x is Hermitian")
    }

    pub fn pauli_y() -> Self {
        Self::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        ))
        .expect("pauli y is Hermitian")
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: &self.m * c(s, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m + &other.m,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m - &other.m,
        })
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m * c(a, 0.0) + &other.m * c(b, 0.0),
        })
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        check_dims(self.dim(), u.nrows())?;
        Ok(Self::from_matrix_lossy(u * &self.m * u.adjoint()))
    }

    /// `i[self, other]`, which is Hermitian whenever both factors are.
    pub fn i_commutator(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        let comm = &self.m * &other.m - &other.m * &self.m;
        Ok(Self::from_matrix_lossy(comm * c(0.0, 1.0)))
    }

    pub fn smallest_eigenvalue(&self) -> Result<f64> {
        Ok(spectral_decompose(self)?.eigenvalues[0])
    }
}

pub(crate) fn check_dims(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Eigenvalues in ascending order with the matching eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub unitary: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(φ(λ)) U†`.
    pub fn reconstruct_with(&self, phi: impl Fn(f64) -> f64) -> CMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&l| phi(l)).collect();
        self.reconstruct_from_values(&values)
    }

    /// `U diag(values) U†`.
    pub fn reconstruct_from_values(&self, values: &[f64]) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.unitary.clone();
        for j in 0..n {
            let s = values[j];
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        scaled * self.unitary.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `U† X U`.
    pub fn to_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        self.unitary.adjoint() * x * &self.unitary
    }

    /// `U X̃ U†`.
    pub fn from_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        &self.unitary * x * self.unitary.adjoint()
    }

    /// Block labels: `blocks[i] == blocks[j]` iff eigenvalues `i` and `j`
    /// are within the degeneracy gap of each other along the sorted chain.
    pub fn degeneracy_blocks(&self) -> Vec<usize> {
        let lmax = self.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let gap = DEGENERACY_GAP * lmax.max(1.0);
        let mut labels = Vec::with_capacity(self.dim());
        let mut block = 0;
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            if i > 0 && (l - self.eigenvalues[i - 1]).abs() > gap {
                block += 1;
            }
            labels.push(block);
        }
        labels
    }
}

/// Diagonalises a Hermitian matrix.
pub fn spectral_decompose(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = h.dim();
    let eig = SymmetricEigen::try_new(h.m.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::EigenNoConvergence { dim: n })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let unitary = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SpectralDecomposition { eigenvalues, unitary })
}

/// A strictly positive, unit-trace Hermitian matrix.
///
/// The spectral decomposition is computed once at construction and reused by
/// every metric evaluation at this point.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    base: HermitianMatrix,
    spectrum: SpectralDecomposition,
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl DensityMatrix {
    pub fn new(base: HermitianMatrix) -> Result<Self> {
        let trace = base.trace();
        if trace.is_nan() || (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { trace });
        }
        let spectrum = spectral_decompose(&base)?;
        let min_eigenvalue = spectrum.eigenvalues[0];
        if min_eigenvalue.is_nan() || min_eigenvalue <= 0.0 {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { base, spectrum })
    }

    /// Divides a positive Hermitian matrix by its trace.
    pub fn normalized(h: &HermitianMatrix) -> Result<Self> {
        let t = h.trace();
        if t.is_nan() || t <= 0.0 {
            return Err(Error::TraceNotOne { trace: t });
        }
        Self::new(h.scale(1.0 / t))
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(p))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::new(HermitianMatrix::identity(n).scale(1.0 / n as f64)).expect("I/n is a state")
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn as_matrix(&self) -> &CMatrix {
        self.base.as_matrix()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    /// `(1 − ε)ρ + ε·I/n`.
    pub fn mix_with_identity(&self, eps: f64) -> Result<Self> {
        let n = self.dim();
        let m = HermitianMatrix::identity(n);
        Self::new(self.base.lincomb(1.0 - eps, &m, eps / n as f64)?)
    }

    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        Self::new(self.base.conjugate_by(u)?)
    }

    /// `ρ^{1/2}`.
    pub fn sqrt(&self) -> HermitianMatrix {
        HermitianMatrix::from_matrix_lossy(self.spectrum.reconstruct_with(f64::sqrt))
    }
}

/// A traceless Hermitian matrix, i.e. a tangent vector to the state space.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: HermitianMatrix,
}

impl TangentVector {
    pub fn new(base: HermitianMatrix) -> Result<Self> {
        let trace = base.trace();
        if trace.is_nan() || trace.abs() > TRACE_TOL {
            return Err(Error::NotTraceless { trace });
        }
        Ok(Self { base })
    }

    /// Removes the trace: `H − (Tr H / n)·I`.
    pub fn project(h: &HermitianMatrix) -> Self {
        let n = h.dim();
        let shift = h.trace() / n as f64;
        let mut m = h.as_matrix().clone();
        for i in 0..n {
            m[(i, i)] -= c(shift, 0.0);
        }
        Self {
            base: HermitianMatrix { m },
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            base: HermitianMatrix::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn as_matrix(&self) -> &CMatrix {
        self.base.as_matrix()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            base: self.base.scale(s),
        }
    }

    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        Ok(Self {
            base: self.base.conjugate_by(u)?,
        })
    }

    /// Rescales to unit Hilbert-Schmidt norm; the zero vector is returned as is.
    pub fn normalized(&self) -> Self {
        let norm = self.base.hs_norm();
        if norm == 0.0 {
            self.clone()
        } else {
            self.scale(1.0 / norm)
        }
    }
}

impl From<TangentVector> for HermitianMatrix {
    fn from(t: TangentVector) -> Self {
        t.base
    }
}

impl AsRef<HermitianMatrix> for TangentVector {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.base
    }
}

impl AsRef<HermitianMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        self
    }
}

impl AsRef<HermitianMatrix> for DensityMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.base
    }
}

/// `A = commuting + i[ρ, generator]` with the two parts Hilbert-Schmidt orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentSplit {
    pub commuting: TangentVector,
    pub generator: HermitianMatrix,
}

impl TangentSplit {
    /// `i[ρ, generator]`.
    pub fn orthogonal_part(&self, rho: &DensityMatrix) -> HermitianMatrix {
        rho.as_hermitian()
            .i_commutator(&self.generator)
            .expect("split built at rho's dimension")
    }
}

fn domain_check(v: f64, what: &str, at: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{what} is not finite at {at}")))
    }
}

/// `U diag(φ(λ)) U†` for a Hermitian argument.
pub fn hermitian_function(h: &HermitianMatrix, phi: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let decomp = spectral_decompose(h)?;
    function_of_spectrum(&decomp, phi)
}

fn function_of_spectrum(decomp: &SpectralDecomposition, phi: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let values = decomp
        .eigenvalues
        .iter()
        .map(|&l| domain_check(phi(l), "scalar function", l))
        .collect::<Result<Vec<_>>>()?;
    Ok(HermitianMatrix::from_matrix_lossy(
        decomp.reconstruct_from_values(&values),
    ))
}

/// Functional calculus `φ(ρ)`.
pub fn matrix_function(rho: &DensityMatrix, phi: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    function_of_spectrum(rho.spectrum(), phi)
}

/// Multiplies the eigenbasis entries of `x` by `k(λ_i, λ_j)`.
///
/// Works for any square `x`; the output is Hermitian when `x` is and `k` is
/// real and symmetric.
pub fn kernel_transform(
    decomp: &SpectralDecomposition,
    k: impl Fn(f64, f64) -> f64,
    x: &CMatrix,
) -> Result<CMatrix> {
    let n = decomp.dim();
    check_dims(n, x.nrows())?;
    let mut xt = decomp.to_eigenbasis(x);
    for i in 0..n {
        for j in 0..n {
            let (li, lj) = (decomp.eigenvalues[i], decomp.eigenvalues[j]);
            let w = k(li, lj);
            if !w.is_finite() {
                return Err(Error::Domain(format!("kernel is not finite at ({li}, {lj})")));
            }
            xt[(i, j)] *= w;
        }
    }
    Ok(decomp.from_eigenbasis(&xt))
}

/// `k(L_ρ, R_ρ)(X)`.
pub fn apply_kernel_superop(
    rho: &DensityMatrix,
    k: impl Fn(f64, f64) -> f64,
    x: &HermitianMatrix,
) -> Result<HermitianMatrix> {
    kernel_transform(rho.spectrum(), k, x.as_matrix()).map(HermitianMatrix::from_matrix_lossy)
}

/// Hilbert-Schmidt inner product `Tr(A†B)`; real for Hermitian arguments.
pub fn hs_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    // Tr(A†B) = Σ conj(a_ij) b_ij
    Ok(a.as_matrix()
        .iter()
        .zip(b.as_matrix().iter())
        .map(|(x, y)| (x.conj() * y).re)
        .sum())
}

/// Splits a tangent vector into its part commuting with `ρ` and `i[ρ, U]`.
///
/// In the eigenbasis of `ρ`, entries inside a degeneracy block go to the
/// commuting part and the rest define `U_ij = Ã_ij / (i(λ_i − λ_j))`.
pub fn tangent_split(rho: &DensityMatrix, a: &TangentVector) -> Result<TangentSplit> {
    let decomp = rho.spectrum();
    let n = decomp.dim();
    check_dims(n, a.dim())?;
    let blocks = decomp.degeneracy_blocks();
    let at = decomp.to_eigenbasis(a.as_matrix());
    let mut comm = CMatrix::zeros(n, n);
    let mut gen = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if blocks[i] == blocks[j] {
                comm[(i, j)] = at[(i, j)];
            } else {
                let gap = decomp.eigenvalues[i] - decomp.eigenvalues[j];
                gen[(i, j)] = at[(i, j)] / c(0.0, gap);
            }
        }
    }
    let commuting =
        TangentVector::project(&HermitianMatrix::from_matrix_lossy(decomp.from_eigenbasis(&comm)));
    let generator = HermitianMatrix::from_matrix_lossy(decomp.from_eigenbasis(&gen));
    Ok(TangentSplit { commuting, generator })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    #[test]
    fn decompose_diagonal() {
        let h = HermitianMatrix::from_real_diagonal(&[0.1, 0.9]);
        let d = spectral_decompose(&h).unwrap();
        assert!(close(d.eigenvalues[0], 0.1, 1e-15));
        assert!(close(d.eigenvalues[1], 0.9, 1e-15));
        let abs_u = d.unitary.map(|z| z.norm());
        assert!((abs_u - nalgebra::DMatrix::<f64>::identity(2, 2)).amax() < 1e-14);
    }

    #[test]
    fn decompose_scalar_matrix() {
        let h = HermitianMatrix::identity(2).scale(0.5);
        let d = spectral_decompose(&h).unwrap();
        assert_eq!(d.eigenvalues, vec![0.5, 0.5]);
        let gram = d.unitary.adjoint() * &d.unitary;
        assert!(max_abs_diff(&gram, &CMatrix::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn decompose_random_reconstructs() {
        for seed in 0..20 {
            let h = random_hermitian(4, seed);
            let d = spectral_decompose(&h).unwrap();
            let scale = 1.0 + h.hs_norm();
            assert!(max_abs_diff(&d.reconstruct(), h.as_matrix()) < 1e-10 * scale);
            assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn density_rejects_bad_trace_and_singular() {
        assert!(matches!(
            DensityMatrix::from_diagonal(&[0.5, 0.6]),
            Err(Error::TraceNotOne { .. })
        ));
        assert!(matches!(
            DensityMatrix::from_diagonal(&[1.0, 0.0]),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn matrix_function_sqrt() {
        let rho = DensityMatrix::from_diagonal(&[0.25, 0.75]).unwrap();
        let s = matrix_function(&rho, f64::sqrt).unwrap();
        assert!(close(s.as_matrix()[(0, 0)].re, 0.5, 1e-15));
        assert!(close(s.as_matrix()[(1, 1)].re, 0.75f64.sqrt(), 1e-15));
        let id = matrix_function(&rho, |x| x).unwrap();
        assert!(max_abs_diff(id.as_matrix(), rho.as_matrix()) < 1e-15);
    }

    #[test]
    fn matrix_function_composition() {
        let rho = random_density(4, 3);
        let quarter = matrix_function(&rho, |x| x.powf(0.25)).unwrap();
        let sqrt = DensityMatrix::normalized(&rho.sqrt()).unwrap();
        let t = rho.sqrt().trace();
        let twice = matrix_function(&sqrt, |x| (x * t).sqrt()).unwrap();
        assert!(max_abs_diff(quarter.as_matrix(), twice.as_matrix()) < 1e-12);
    }

    #[test]
    fn matrix_function_domain_error() {
        let rho = random_density(3, 1);
        assert!(matches!(
            matrix_function(&rho, |x| (x - 0.9).ln()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn kernel_identity_and_inverse() {
        let rho = DensityMatrix::from_diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let x = random_hermitian(3, 9);
        let same = apply_kernel_superop(&rho, |_, _| 1.0, &x).unwrap();
        assert!(max_abs_diff(same.as_matrix(), x.as_matrix()) < 1e-14);

        let xd = HermitianMatrix::from_real_diagonal(&[1.0, -2.0, 3.0]);
        let inv = apply_kernel_superop(&rho, |a, _| 1.0 / a, &xd).unwrap();
        for (i, (v, l)) in [(1.0, 0.2), (-2.0, 0.3), (3.0, 0.5)].iter().enumerate() {
            assert!(close(inv.as_matrix()[(i, i)].re, v / l, 1e-13));
        }
    }

    #[test]
    fn kernel_cwy_at_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(2);
        let cwy = |x: f64, y: f64| 4.0 / (x.sqrt() + y.sqrt()).powi(2);
        let out = apply_kernel_superop(&rho, cwy, &HermitianMatrix::pauli_x()).unwrap();
        let expect = HermitianMatrix::pauli_x().scale(2.0);
        assert!(max_abs_diff(out.as_matrix(), expect.as_matrix()) < 1e-14);
    }

    #[test]
    fn hs_inner_pauli() {
        let (x, y) = (HermitianMatrix::pauli_x(), HermitianMatrix::pauli_y());
        let i2 = HermitianMatrix::identity(2);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), 2.0);
        assert_eq!(hs_inner(&x, &y).unwrap(), 0.0);
        assert_eq!(hs_inner(&x, &x).unwrap(), 2.0);
        assert!(matches!(
            hs_inner(&x, &HermitianMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn split_commuting_case() {
        let rho = DensityMatrix::from_diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let a = TangentVector::new(HermitianMatrix::from_real_diagonal(&[0.1, 0.2, -0.3])).unwrap();
        let s = tangent_split(&rho, &a).unwrap();
        assert!(max_abs_diff(s.commuting.as_matrix(), a.as_matrix()) < 1e-15);
        assert!(s.generator.hs_norm() < 1e-15);
    }

    #[test]
    fn split_two_by_two_by_hand() {
        // U_12 = A_12 / (i(λ_1 − λ_2)) = 1 / (0.8i) = −i/0.8
        let rho = DensityMatrix::from_diagonal(&[0.9, 0.1]).unwrap();
        let a = TangentVector::new(HermitianMatrix::pauli_x()).unwrap();
        let s = tangent_split(&rho, &a).unwrap();
        assert!(s.commuting.as_hermitian().hs_norm() < 1e-15);
        let g = s.generator.as_matrix();
        assert!((g[(0, 1)] - c(0.0, -1.0 / 0.8)).norm() < 1e-14);
        assert!((g[(1, 0)] - c(0.0, 1.0 / 0.8)).norm() < 1e-14);
        let back = s.orthogonal_part(&rho);
        assert!(max_abs_diff(back.as_matrix(), a.as_matrix()) < 1e-14);
    }

    #[test]
    fn split_reconstructs_on_random_inputs() {
        for seed in 0..50u64 {
            let n = 2 + (seed % 4) as usize;
            let rho = random_density(n, seed);
            let a = random_tangent(n, seed + 1000);
            let s = tangent_split(&rho, &a).unwrap();
            let orth = s.orthogonal_part(&rho);
            let sum = s.commuting.as_hermitian().add(&orth).unwrap();
            assert!(max_abs_diff(sum.as_matrix(), a.as_matrix()) < 1e-9);
            assert!(hs_inner(s.commuting.as_hermitian(), &orth).unwrap().abs() < 1e-9);
            let comm = rho
                .as_hermitian()
                .i_commutator(s.commuting.as_hermitian())
                .unwrap();
            assert!(comm.hs_norm() < 1e-9);
        }
    }

    #[test]
    fn split_degenerate_block() {
        let rho = DensityMatrix::from_diagonal(&[0.25, 0.25, 0.5]).unwrap();
        let a = random_tangent(3, 77);
        let s = tangent_split(&rho, &a).unwrap();
        let m = s.commuting.as_matrix();
        assert!((m[(0, 1)] - a.as_matrix()[(0, 1)]).norm() < 1e-14);
        let sum = s.commuting.as_hermitian().add(&s.orthogonal_part(&rho)).unwrap();
        assert!(max_abs_diff(sum.as_matrix(), a.as_matrix()) < 1e-12);
    }
}
