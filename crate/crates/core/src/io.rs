//! JSON formats for states and Hamiltonians.
//!
//! A matrix is `{"dims": [2, 2], "re": [...], "im": [...]}` with row-major
//! real and imaginary parts; `im` may be omitted for real matrices. A
//! Hamiltonian file is either such a matrix or `{"local": [m1, m2, ...]}`
//! listing one matrix per tensor factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, C64};
use crate::states::{DensityMatrix, Hamiltonian};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<f64>,
}

impl MatrixSpec {
    pub fn from_matrix(m: &ComplexMatrix, dims: Vec<usize>) -> Self {
        let (re, im) = m.as_slice().iter().map(|z| (z.re, z.im)).unzip();
        Self { dims, re, im }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n: usize = self.dims.iter().product();
        if self.dims.is_empty() || n == 0 {
            return Err(Error::DimensionMismatch(format!("bad dims {:?}", self.dims)));
        }
        if self.re.len() != n * n {
            return Err(Error::DimensionMismatch(format!("dims {:?} need {} entries, `re` has {}", self.dims, n * n, self.re.len())));
        }
        if !self.im.is_empty() && self.im.len() != n * n {
            return Err(Error::DimensionMismatch(format!("dims {:?} need {} entries, `im` has {}", self.dims, n * n, self.im.len())));
        }
        let data = (0..n * n).map(|k| C64::new(self.re[k], self.im.get(k).copied().unwrap_or(0.0))).collect();
        ComplexMatrix::from_row_major(n, data)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HamiltonianSpec {
    Local { local: Vec<MatrixSpec> },
    Full(MatrixSpec),
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("malformed JSON: {e}")))
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let spec: MatrixSpec = parse(text)?;
    DensityMatrix::new(spec.to_matrix()?, spec.dims)
}

pub fn parse_hamiltonian(text: &str) -> Result<Hamiltonian> {
    match parse::<HamiltonianSpec>(text)? {
        HamiltonianSpec::Local { local } => Hamiltonian::from_local(local.iter().map(|m| m.to_matrix()).collect::<Result<_>>()?),
        HamiltonianSpec::Full(m) => Hamiltonian::new(m.to_matrix()?),
    }
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&MatrixSpec::from_matrix(rho.matrix(), rho.dims().to_vec())).expect("plain numbers serialise")
}
