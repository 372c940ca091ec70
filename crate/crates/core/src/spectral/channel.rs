use super::{check_dims, CMatrix, DensityMatrix, HermitianMatrix, TangentVector};
use crate::error::{Error, Result};

/// A completely positive, trace-preserving map `X ↦ Σ K_i X K_i†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    input_dim: usize,
    output_dim: usize,
    kraus: Vec<CMatrix>,
}

const COMPLETENESS_TOL: f64 = 1e-10;

fn completeness(input_dim: usize, kraus: &[CMatrix]) -> f64 {
    let mut sum = CMatrix::zeros(input_dim, input_dim);
    for k in kraus {
        sum += k.adjoint() * k;
    }
    (sum - CMatrix::identity(input_dim, input_dim))
        .iter()
        .fold(0.0, |m, z| m.max(z.norm()))
}

impl KrausChannel {
    pub fn new(input_dim: usize, output_dim: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidArgument(
                "a channel needs at least one Kraus operator".into(),
            ));
        }
        for k in &kraus {
            if k.nrows() != output_dim || k.ncols() != input_dim {
                return Err(Error::InvalidArgument(format!(
                    "Kraus operator is {}x{}, expected {output_dim}x{input_dim}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let residual = completeness(input_dim, &kraus);
        if residual.is_nan() || residual > COMPLETENESS_TOL {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(Self {
            input_dim,
            output_dim,
            kraus,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, n, vec![CMatrix::identity(n, n)]).expect("identity is a channel")
    }

    /// `X ↦ Tr(X)·I/n`, realised by the `n²` operators `|i⟩⟨j| / √n`.
    pub fn completely_depolarizing(n: usize) -> Self {
        let s = 1.0 / (n as f64).sqrt();
        let mut kraus = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut k = CMatrix::zeros(n, n);
                k[(i, j)] = super::c(s, 0.0);
                kraus.push(k);
            }
        }
        Self::new(n, n, kraus).expect("depolarizing Kraus set is complete")
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `max |Σ K_i†K_i − I|`.
    pub fn completeness_residual(&self) -> f64 {
        completeness(self.input_dim, &self.kraus)
    }

    pub fn apply(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        check_dims(self.input_dim, x.dim())?;
        let mut out = CMatrix::zeros(self.output_dim, self.output_dim);
        for k in &self.kraus {
            out += k * x.as_matrix() * k.adjoint();
        }
        Ok(HermitianMatrix::from_matrix_lossy(out))
    }

    /// Image of a tangent vector, with the roundoff trace removed.
    pub fn apply_tangent(&self, a: &TangentVector) -> Result<TangentVector> {
        Ok(TangentVector::project(&self.apply(a.as_hermitian())?))
    }

    /// Image of a state; fails if the output is not strictly positive.
    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply(rho.as_hermitian())?)
    }
}

/// `Σ K_i X K_i†`.
pub fn apply_channel(t: &KrausChannel, x: &HermitianMatrix) -> Result<HermitianMatrix> {
    t.apply(x)
}
