use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; rejects non-square lengths and
    /// non-finite entries.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState(format!(
                "non-finite entry at ({}, {})",
                k / dim,
                k % dim
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// |v><v|
    pub fn projector(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from Hermiticity and where it occurs.
    pub fn hermitian_deviation(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let (max_dev, row, col) = self.hermitian_deviation();
        if max_dev > tol {
            Err(Error::NotHermitian { max_dev, row, col })
        } else {
            Ok(())
        }
    }

    /// (m + m^dag) / 2
    pub fn hermitize(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Real part of tr(self * other), the expectation value when both are Hermitian.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        self.trace_product(other).re
    }

    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    /// u^dag m u
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(&u.adjoint() * self) * u
    }

    /// u m u^dag
    pub fn transform(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim;
        (0..n).map(|i| (0..n).map(|k| self.data[i * n + k] * v[k]).sum()).collect()
    }

    pub fn unitarity_deviation(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.dim)).max_abs()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && (self - other).max_abs() <= tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        ComplexMatrix { dim: n, data: out }
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product a ⊗ b.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    ComplexMatrix::from_fn(na * nb, |i, j| a[(i / nb, j / nb)] * b[(i % nb, j % nb)])
}

/// Kronecker product of a list of factors, left to right.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, m| tensor(&acc, m))
}

/// Traces out every factor not listed in `keep`. Kept factors stay in their
/// original order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if total != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "factor dimensions {dims:?} multiply to {total}, matrix is {}x{}",
            m.dim(),
            m.dim()
        )));
    }
    if let Some(&k) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "factor index {k} out of range for {} factors",
            dims.len()
        )));
    }
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep_sorted.contains(k)).collect();

    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let env_dim: usize = traced_dims.iter().product();

    // Row-major strides of the full index.
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let offset = |digits_kept: usize, digits_env: usize| -> usize {
        let mut idx = 0;
        let mut rem = digits_kept;
        for (pos, &k) in keep_sorted.iter().enumerate().rev() {
            let d = kept_dims[pos];
            idx += (rem % d) * strides[k];
            rem /= d;
        }
        let mut rem = digits_env;
        for (pos, &k) in traced.iter().enumerate().rev() {
            let d = traced_dims[pos];
            idx += (rem % d) * strides[k];
            rem /= d;
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(out_dim);
    for i in 0..out_dim {
        for j in 0..out_dim {
            let mut acc = ZERO;
            for e in 0..env_dim {
                acc += m[(offset(i, e), offset(j, e))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
}

pub fn pauli_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 1)] = -I;
    m[(1, 0)] = I;
    m
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_examples() {
        let id4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert!(id4.approx_eq(&ComplexMatrix::identity(4), 0.0));

        let p0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert!(tensor(&p0, &p0).approx_eq(&ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0]), 0.0));

        let zz = tensor(&pauli_z(), &pauli_z());
        assert!(zz.approx_eq(&ComplexMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0]), 0.0));
    }

    #[test]
    fn partial_trace_examples() {
        let a = ComplexMatrix::from_fn(2, |i, j| C64::new(0.1 * (i + 2 * j) as f64, 0.05 * i as f64));
        let b = ComplexMatrix::from_real_diag(&[0.3, 0.7]);
        let ab = tensor(&a, &b);
        assert!(partial_trace(&ab, &[2, 2], &[0]).unwrap().approx_eq(&a, 1e-12));
        assert!(partial_trace(&ab, &[2, 2], &[1])
            .unwrap()
            .approx_eq(&b.scale(a.trace()), 1e-12));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [ZERO, C64::new(s, 0.0), C64::new(s, 0.0), ZERO];
        let bell = ComplexMatrix::projector(&psi);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(partial_trace(&bell, &[2, 2], &[0]).unwrap().approx_eq(&half, 1e-12));

        let mixed = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(partial_trace(&mixed, &[2, 2], &[1]).unwrap().approx_eq(&half, 1e-12));
    }

    #[test]
    fn partial_trace_three_factors_keeps_order() {
        let a = ComplexMatrix::from_real_diag(&[0.2, 0.8]);
        let b = ComplexMatrix::from_real_diag(&[0.6, 0.3, 0.1]);
        let c = ComplexMatrix::from_fn(2, |i, j| if i == j { C64::new(0.5, 0.0) } else { C64::new(0.1, 0.2 * (i as f64 - 0.5)) });
        let abc = tensor_all([&a, &b, &c]);
        let ac = partial_trace(&abc, &[2, 3, 2], &[2, 0]).unwrap();
        assert!(ac.approx_eq(&tensor(&a, &c), 1e-12));
        let bb = partial_trace(&abc, &[2, 3, 2], &[1]).unwrap();
        assert!(bb.approx_eq(&b, 1e-12));
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(partial_trace(&m, &[2, 3], &[0]), Err(Error::DimensionMismatch(_))));
        assert!(matches!(partial_trace(&m, &[2, 2], &[2]), Err(Error::DimensionMismatch(_))));
    }
}
