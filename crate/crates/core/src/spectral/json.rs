//! `{"n": int, "re": [[f64; n]; n], "im": [[f64; n]; n]}` matrix files.

use serde::{Deserialize, Serialize};

use super::{DensityMatrix, HermitianMatrix, TangentVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn parse(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if m.n == 0 || m.re.len() != m.n || m.im.len() != m.n {
            return Err(Error::Parse(format!("`re` and `im` must have n = {} rows", m.n)));
        }
        Ok(m)
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::from_parts(&self.re, &self.im)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_hermitian()?)
    }

    pub fn to_tangent(&self) -> Result<TangentVector> {
        TangentVector::new(self.to_hermitian()?)
    }
}

impl From<&HermitianMatrix> for MatrixJson {
    fn from(h: &HermitianMatrix) -> Self {
        let m = h.as_matrix();
        let n = h.dim();
        Self {
            n,
            re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }
}

impl HermitianMatrix {
    pub fn from_json_str(text: &str) -> Result<Self> {
        MatrixJson::parse(text)?.to_hermitian()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&MatrixJson::from(self)).expect("plain data serialises")
    }
}

impl DensityMatrix {
    pub fn from_json_str(text: &str) -> Result<Self> {
        MatrixJson::parse(text)?.to_density()
    }
}

impl TangentVector {
    pub fn from_json_str(text: &str) -> Result<Self> {
        MatrixJson::parse(text)?.to_tangent()
    }
}
