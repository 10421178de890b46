use std::f64::consts::PI;

use super::eigen::{eigh, HermitianEigen};
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Eigenvalues below this are treated as zero: `ln` clamps to it and
/// entropy-like sums skip them (0 ln 0 = 0).
pub const EIGEN_FLOOR: f64 = 1e-14;

pub const UNITARY_TOL: f64 = 1e-10;

/// Groups cos-eigenvalues closer than this before splitting them with the
/// anti-Hermitian part in [`matrix_log_unitary`].
const PHASE_CLUSTER_TOL: f64 = 1e-6;

/// V f(diag) V^dag for a real scalar function. Fails if `f` is not finite on
/// some eigenvalue.
pub fn matrix_fn(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let e = eigh(m)?;
    map_real(&e, f)
}

pub(crate) fn map_real(e: &HermitianEigen, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let values: Vec<f64> = e.eigenvalues.iter().map(|&l| f(l)).collect();
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::DomainError(e.eigenvalues[k]));
    }
    let v = &e.eigenvectors;
    let n = e.dim();
    Ok(ComplexMatrix::from_fn(n, |i, j| {
        (0..n).map(|k| v[(i, k)] * values[k] * v[(j, k)].conj()).sum()
    }))
}

/// Natural log with eigenvalues clamped from below at [`EIGEN_FLOOR`].
pub fn log_regularized(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_fn(m, |l| l.max(EIGEN_FLOOR).ln())
}

/// Square root of a positive semidefinite matrix; tiny negative eigenvalues
/// from round-off are clamped to zero.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_fn(m, |l| l.max(0.0).sqrt())
}

pub fn exp_hermitian(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_fn(m, f64::exp)
}

/// e^{i s G} for Hermitian G given its eigendecomposition.
pub fn exp_i(e: &HermitianEigen, s: f64) -> ComplexMatrix {
    e.map(|l| C64::from_polar(1.0, s * l))
}

/// Principal logarithm of a unitary: Hermitian G with e^{iG} = u and
/// eigenphases in (-pi, pi].
///
/// The eigenbasis comes from the Hermitian part (u + u^dag)/2; clusters of
/// (near-)equal cosines are re-diagonalised with (u - u^dag)/2i, so conjugate
/// pairs e^{±i theta} are separated deterministically.
pub fn matrix_log_unitary(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dev = u.unitarity_deviation();
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let n = u.dim();
    let ud = u.adjoint();
    let re_part = (u + &ud).scale_real(0.5).hermitize();
    let im_part = (u - &ud).scale(C64::new(0.0, -0.5)).hermitize();

    let e = eigh(&re_part)?;
    let mut basis = e.eigenvectors.clone();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && e.eigenvalues[end] - e.eigenvalues[end - 1] < PHASE_CLUSTER_TOL {
            end += 1;
        }
        if end - start > 1 {
            split_cluster(&mut basis, &im_part, start, end)?;
        }
        start = end;
    }

    let phases: Vec<f64> = (0..n)
        .map(|k| {
            let w = basis.column(k);
            let uw = u.mul_vec(&w);
            let z: C64 = w.iter().zip(&uw).map(|(a, b)| a.conj() * b).sum();
            let theta = z.arg();
            if theta <= -PI + 1e-12 {
                PI
            } else {
                theta
            }
        })
        .collect();

    let g = ComplexMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| basis[(i, k)] * phases[k] * basis[(j, k)].conj())
            .sum()
    });
    Ok(g.hermitize())
}

fn split_cluster(basis: &mut ComplexMatrix, op: &ComplexMatrix, start: usize, end: usize) -> Result<()> {
    let n = basis.dim();
    let k = end - start;
    let cols: Vec<Vec<C64>> = (start..end).map(|c| basis.column(c)).collect();
    let op_cols: Vec<Vec<C64>> = cols.iter().map(|c| op.mul_vec(c)).collect();
    let block = ComplexMatrix::from_fn(k, |a, b| {
        cols[a].iter().zip(&op_cols[b]).map(|(x, y)| x.conj() * y).sum()
    })
    .hermitize();
    let be = eigh(&block)?;
    for (new_col, c) in (start..end).enumerate() {
        for row in 0..n {
            basis[(row, c)] = (0..k).map(|a| cols[a][row] * be.eigenvectors[(a, new_col)]).sum();
        }
    }
    Ok(())
}

/// Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)), clamped to [0, 1].
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    let sr = sqrt_psd(rho)?;
    let inner = (&(&sr * sigma) * &sr).hermitize();
    let e = eigh(&inner)?;
    let f: f64 = e.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Bures angle arccos F(rho, sigma), in [0, pi/2].
///
/// Pairs closer than 1e-14 in trace distance return exactly zero: below that
/// the fidelity is 1 to machine precision and arccos would only amplify the
/// round-off.
pub fn bures_angle(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    if trace_distance(rho, sigma)? <= 1e-14 {
        return Ok(0.0);
    }
    Ok(fidelity(rho, sigma)?.acos())
}

/// Half the trace norm of rho - sigma.
pub fn trace_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    let diff = (rho - sigma).hermitize();
    let e = eigh(&diff)?;
    Ok(0.5 * e.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

fn check_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", a.dim(), a.dim(), b.dim(), b.dim())));
    }
    Ok(())
}
