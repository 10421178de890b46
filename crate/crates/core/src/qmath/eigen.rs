use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::Result;

/// Entrywise tolerance on |m - m^dag| accepted by [`eigh`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// unitary whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// V f(diag) V^dag
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = self.dim();
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| C64::new(l, 0.0))
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Sweeps run in fixed (p, q) order, eigenvalues are sorted ascending with the
/// pre-sort column index as tie-breaker, and every eigenvector is rephased so
/// its largest-magnitude component is real and positive. Identical input
/// therefore always yields identical output.
pub fn eigh(m: &ComplexMatrix) -> Result<HermitianEigen> {
    m.check_hermitian(HERMITIAN_TOL)?;
    Ok(jacobi(m.hermitize()))
}

fn jacobi(mut a: ComplexMatrix) -> HermitianEigen {
    let n = a.dim();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= OFF_DIAGONAL_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag = a.real_diagonal();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&k| diag[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        let mut vec = v.column(k);
        normalize_phase(&mut vec);
        for (row, z) in vec.into_iter().enumerate() {
            eigenvectors[(row, col)] = z;
        }
    }
    HermitianEigen { eigenvalues, eigenvectors }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation zeroing a[p][q]: a phase on column q makes the
/// entry real, then a real Givens rotation annihilates it.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let n = a.dim();
    let phase = apq / mag;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = [[c, s], [-s e^{-ia}, c e^{-ia}]] on (p, q).
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// Rotates the global phase so the first component of (near-)maximal
/// magnitude is real and positive.
pub(crate) fn normalize_phase(vec: &mut [C64]) {
    let max = vec.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = vec
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-9))
        .unwrap_or(0);
    let ph = vec[pivot].conj() / vec[pivot].norm();
    for z in vec.iter_mut() {
        *z *= ph;
    }
    vec[pivot] = C64::new(vec[pivot].re, 0.0);
}
