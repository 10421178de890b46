//! Density matrices, Hamiltonians, thermal and X-state constructors, effective
//! qubit temperatures and seeded random-state generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::qmath::{eigh, partial_trace, tensor, ComplexMatrix, HermitianEigen, C64, ZERO};

/// Tolerance on Hermiticity, unit trace and negativity of the spectrum.
pub const STATE_TOL: f64 = 1e-10;

/// Positive semidefinite, unit-trace Hermitian matrix with its tensor-factor
/// dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || total != matrix.dim() {
            return Err(Error::DimensionMismatch(format!(
                "factor dimensions {dims:?} do not match a {}x{} matrix",
                matrix.dim(),
                matrix.dim()
            )));
        }
        matrix.check_hermitian(STATE_TOL)?;
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {:.12} + {:.3e}i, expected 1", tr.re, tr.im)));
        }
        let matrix = matrix.hermitize();
        let min = eigh(&matrix)?.eigenvalues[0];
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix, dims })
    }

    /// Single-factor state.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.dim();
        Self::new(matrix, vec![d])
    }

    /// |psi><psi| after normalising `psi`.
    pub fn pure(psi: &[C64], dims: Vec<usize>) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::projector(&v), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self { matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64), dims }
    }

    /// Skips validation; callers guarantee a valid state.
    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        Self { matrix: matrix.hermitize(), dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        Self::new(self.matrix.clone(), dims)
    }

    pub fn eigen(&self) -> HermitianEigen {
        eigh(&self.matrix).expect("density matrix is Hermitian by construction")
    }

    /// Eigenvalues clipped to be non-negative.
    pub fn spectrum(&self) -> Vec<f64> {
        self.eigen().eigenvalues.into_iter().map(|l| l.max(0.0)).collect()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product_re(&self.matrix)
    }

    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        self.matrix.trace_product_re(op)
    }

    /// Reduced state on the listed factors (kept in their original order).
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        let mut k: Vec<usize> = keep.to_vec();
        k.sort_unstable();
        k.dedup();
        let dims = k.iter().map(|&i| self.dims[i]).collect();
        Ok(Self::from_parts_unchecked(m, dims))
    }

    pub fn marginal(&self, factor: usize) -> Result<DensityMatrix> {
        self.reduce(&[factor])
    }

    /// Bipartite marginals (A, B) of a two-factor state.
    pub fn marginals(&self) -> Result<(DensityMatrix, DensityMatrix)> {
        self.require_bipartite()?;
        Ok((self.marginal(0)?, self.marginal(1)?))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_parts_unchecked(tensor(&self.matrix, &other.matrix), dims)
    }

    /// u rho u^dag
    pub fn evolve_unitary(&self, u: &ComplexMatrix) -> DensityMatrix {
        Self::from_parts_unchecked(self.matrix.transform(u), self.dims.clone())
    }

    pub fn require_bipartite(&self) -> Result<()> {
        if self.dims.len() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected a bipartite state, got factor dimensions {:?}",
                self.dims
            )));
        }
        Ok(())
    }

    pub fn require_two_qubits(&self) -> Result<()> {
        if self.dims != [2, 2] {
            return Err(Error::DimensionMismatch(format!(
                "expected two qubits (dims [2, 2]), got {:?}",
                self.dims
            )));
        }
        Ok(())
    }
}

/// Hermitian observable in units with hbar = 1. When built from local parts,
/// `matrix` is their sum h_A ⊗ 1 + 1 ⊗ h_B (+ ...).
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    matrix: ComplexMatrix,
    local: Option<Vec<ComplexMatrix>>,
    eigen: HermitianEigen,
}

impl Hamiltonian {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let eigen = eigh(&matrix)?;
        Ok(Self { matrix: matrix.hermitize(), local: None, eigen })
    }

    pub fn from_local(parts: Vec<ComplexMatrix>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("no local Hamiltonian parts".into()));
        }
        for p in &parts {
            p.check_hermitian(STATE_TOL)?;
        }
        let dims: Vec<usize> = parts.iter().map(|p| p.dim()).collect();
        let total: usize = dims.iter().product();
        let mut matrix = ComplexMatrix::zeros(total);
        for (k, part) in parts.iter().enumerate() {
            let left: usize = dims[..k].iter().product();
            let right: usize = dims[k + 1..].iter().product();
            let term = tensor(&tensor(&ComplexMatrix::identity(left), part), &ComplexMatrix::identity(right));
            matrix = &matrix + &term;
        }
        let eigen = eigh(&matrix)?;
        Ok(Self { matrix, local: Some(parts), eigen })
    }

    /// Qubit with ground energy 0 and excited energy `omega`.
    pub fn qubit(omega: f64) -> Self {
        Self::new(ComplexMatrix::from_real_diag(&[0.0, omega])).expect("diagonal")
    }

    /// omega (n_1 + n_2) on two qubits, ordering |gg>, |ge>, |eg>, |ee>.
    pub fn two_qubit(omega: f64) -> Self {
        let q = ComplexMatrix::from_real_diag(&[0.0, omega]);
        Self::from_local(vec![q.clone(), q]).expect("diagonal parts")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn local_parts(&self) -> Option<&[ComplexMatrix]> {
        self.local.as_deref()
    }

    pub fn local_dims(&self) -> Option<Vec<usize>> {
        self.local.as_ref().map(|p| p.iter().map(|m| m.dim()).collect())
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    /// Energies, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.eigen.eigenvalues
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn is_trivial(&self) -> bool {
        let e = self.energies();
        e[e.len() - 1] - e[0] <= 1e-12 * e[0].abs().max(1.0)
    }

    /// Copy with `offset` added to every energy (local parts are dropped).
    pub fn shifted(&self, offset: f64) -> Self {
        let m = &self.matrix + &ComplexMatrix::identity(self.dim()).scale_real(offset);
        Self::new(m).expect("shift preserves Hermiticity")
    }
}

/// e^{-beta h}/Z. Energies are shifted by the minimum (beta >= 0) or maximum
/// (beta < 0) before exponentiation so no term overflows. `beta = ±inf`
/// gives the uniform mixture over the ground (resp. top) eigenspace.
pub fn thermal_state(h: &Hamiltonian, beta: f64) -> Result<DensityMatrix> {
    let pops = thermal_populations(h.energies(), beta)?;
    let e = h.eigen();
    let n = h.dim();
    let v = &e.eigenvectors;
    let m = ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * pops[k] * v[(j, k)].conj()).sum());
    let dims = h.local_dims().unwrap_or_else(|| vec![n]);
    Ok(DensityMatrix::from_parts_unchecked(m, dims))
}

/// Boltzmann weights for ascending `energies`.
pub fn thermal_populations(energies: &[f64], beta: f64) -> Result<Vec<f64>> {
    if beta.is_nan() {
        return Err(Error::InvalidParameter("beta is NaN".into()));
    }
    let lo = energies[0];
    let hi = energies[energies.len() - 1];
    let tol = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    let weights: Vec<f64> = if beta == f64::INFINITY {
        energies.iter().map(|&e| if e - lo <= tol { 1.0 } else { 0.0 }).collect()
    } else if beta == f64::NEG_INFINITY {
        energies.iter().map(|&e| if hi - e <= tol { 1.0 } else { 0.0 }).collect()
    } else {
        let reference = if beta >= 0.0 { lo } else { hi };
        energies.iter().map(|&e| (-beta * (e - reference)).exp()).collect()
    };
    let z: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / z).collect())
}

/// Two-qubit X-state in the basis |gg>, |ge>, |eg>, |ee>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    pub p11: f64,
    pub p22: f64,
    pub p33: f64,
    pub p44: f64,
    pub c14: C64,
    pub c23: C64,
}

impl XState {
    pub fn diagonal(p: [f64; 4]) -> Self {
        Self { p11: p[0], p22: p[1], p33: p[2], p44: p[3], c14: ZERO, c23: ZERO }
    }

    pub fn validate(&self) -> Result<()> {
        let pops = [self.p11, self.p22, self.p33, self.p44];
        if pops.iter().any(|&p| p < -STATE_TOL || !p.is_finite()) {
            return Err(Error::PositivityViolation(format!("populations {pops:?} must be non-negative")));
        }
        let s: f64 = pops.iter().sum();
        if (s - 1.0).abs() > STATE_TOL {
            return Err(Error::PositivityViolation(format!("populations sum to {s}, expected 1")));
        }
        if self.c14.norm_sqr() > self.p11 * self.p44 + STATE_TOL {
            return Err(Error::PositivityViolation(format!(
                "|rho14|^2 = {:.6e} exceeds rho11*rho44 = {:.6e}",
                self.c14.norm_sqr(),
                self.p11 * self.p44
            )));
        }
        if self.c23.norm_sqr() > self.p22 * self.p33 + STATE_TOL {
            return Err(Error::PositivityViolation(format!(
                "|rho23|^2 = {:.6e} exceeds rho22*rho33 = {:.6e}",
                self.c23.norm_sqr(),
                self.p22 * self.p33
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::from_real_diag(&[self.p11, self.p22, self.p33, self.p44]);
        m[(0, 3)] = self.c14;
        m[(3, 0)] = self.c14.conj();
        m[(1, 2)] = self.c23;
        m[(2, 1)] = self.c23.conj();
        m
    }
}

pub fn xstate_to_density(x: &XState) -> Result<DensityMatrix> {
    x.validate()?;
    DensityMatrix::new(x.matrix(), vec![2, 2])
}

/// Inverse temperature of a diagonal qubit state relative to splitting omega.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EffectiveTemperature {
    pub beta: f64,
    pub omega: f64,
}

impl EffectiveTemperature {
    /// Diagonal (ground, excited) populations at this temperature.
    pub fn populations(&self) -> [f64; 2] {
        let p = thermal_populations(&[0.0, self.omega], self.beta).expect("beta is not NaN");
        [p[0], p[1]]
    }
}

/// beta = ln(p_g / p_e) / omega for a qubit diagonal in the {|g>, |e>} basis.
/// Returns +inf when p_e < 1e-14 and -inf when p_g < 1e-14.
pub fn effective_beta(rho_qubit: &DensityMatrix, omega: f64) -> Result<EffectiveTemperature> {
    if rho_qubit.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("expected a qubit, got dimension {}", rho_qubit.dim())));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let m = rho_qubit.matrix();
    let coh = m[(0, 1)].norm();
    if coh > STATE_TOL {
        return Err(Error::NotDiagonal(coh));
    }
    let (pg, pe) = (m[(0, 0)].re, m[(1, 1)].re);
    let beta = if pe < 1e-14 {
        f64::INFINITY
    } else if pg < 1e-14 {
        f64::NEG_INFINITY
    } else if pg == pe {
        0.0
    } else {
        (pg / pe).ln() / omega
    };
    Ok(EffectiveTemperature { beta, omega })
}

/// Random two-qubit X-state with rho22 = rho33, so both marginals equal the
/// same diagonal (thermal) qubit state. Populations are ordered so that the
/// shared local beta is non-negative. Returns the state and that beta.
pub fn locally_thermal_xstate_sampler(seed: u64, omega: f64) -> (DensityMatrix, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: [f64; 3] = std::array::from_fn(|_| Exp1.sample(&mut rng));
    let s: f64 = w.iter().sum();
    let (mut p11, p_mid, mut p44) = (w[0] / s, w[1] / s, w[2] / s);
    if p44 > p11 {
        std::mem::swap(&mut p11, &mut p44);
    }
    let p22 = 0.5 * p_mid;
    let c14 = C64::from_polar(rng.random::<f64>() * (p11 * p44).sqrt(), rng.random::<f64>() * std::f64::consts::TAU);
    let c23 = C64::from_polar(rng.random::<f64>() * p22, rng.random::<f64>() * std::f64::consts::TAU);
    let x = XState { p11, p22, p33: p22, p44, c14, c23 };
    let rho = DensityMatrix::from_parts_unchecked(x.matrix(), vec![2, 2]);
    let pg = p11 + p22;
    let pe = p22 + p44;
    let beta = if pg == pe { 0.0 } else { (pg / pe).ln() / omega };
    (rho, beta)
}

/// Ginibre construction G G^dag / tr(G G^dag) with G of shape dim x rank.
pub fn random_density_matrix(dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix> {
    let dim: usize = dims.iter().product();
    if rank == 0 || rank > dim {
        return Err(Error::InvalidParameter(format!("rank must be in 1..={dim}, got {rank}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<C64> = (0..dim * rank).map(|_| gaussian_complex(&mut rng)).collect();
    let m = ComplexMatrix::from_fn(dim, |i, j| (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum());
    let tr = m.trace().re;
    Ok(DensityMatrix::from_parts_unchecked(m.scale_real(1.0 / tr), dims.to_vec()))
}

/// Haar-random unitary from Gram-Schmidt on a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        for c in &cols {
            let ov: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= ov * y;
            }
        }
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_examples() {
        let h = Hamiltonian::new(ComplexMatrix::from_fn(2, |i, j| C64::new(0.3 * (i + j) as f64, 0.0))).unwrap();
        let t0 = thermal_state(&h, 0.0).unwrap();
        assert!(t0.matrix().approx_eq(&ComplexMatrix::identity(2).scale_real(0.5), 1e-14));

        let q = Hamiltonian::qubit(1.0);
        let t1 = thermal_state(&q, 1.0).unwrap();
        let z = 1.0 + (-1.0f64).exp();
        assert!((t1.matrix()[(0, 0)].re - 1.0 / z).abs() < 1e-15);
        assert!((t1.matrix()[(0, 0)].re - 0.731059).abs() < 1e-6);
        assert!((t1.matrix()[(1, 1)].re - 0.268941).abs() < 1e-6);

        let cold = thermal_state(&q, 1e6).unwrap();
        assert!(cold.matrix().approx_eq(&ComplexMatrix::from_real_diag(&[1.0, 0.0]), 1e-10));
    }

    #[test]
    fn thermal_commutes_and_handles_negative_beta() {
        let h = Hamiltonian::new(ComplexMatrix::from_fn(3, |i, j| {
            if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.2, 0.1 * (j as f64 - i as f64)) }
        }))
        .unwrap();
        for beta in [-40.0, -1.0, 0.5, 800.0] {
            let t = thermal_state(&h, beta).unwrap();
            assert!(t.matrix().commutator(h.matrix()).max_abs() < 1e-10);
            assert!((t.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn xstate_examples() {
        let d = xstate_to_density(&XState::diagonal([0.4, 0.3, 0.2, 0.1])).unwrap();
        assert!(d.matrix().approx_eq(&ComplexMatrix::from_real_diag(&[0.4, 0.3, 0.2, 0.1]), 0.0));

        let bell = XState { c23: C64::new(0.5, 0.0), ..XState::diagonal([0.0, 0.5, 0.5, 0.0]) };
        let ev = xstate_to_density(&bell).unwrap().spectrum();
        assert!((ev[3] - 1.0).abs() < 1e-12 && ev[..3].iter().all(|&l| l.abs() < 1e-12));

        let mm = xstate_to_density(&XState::diagonal([0.25; 4])).unwrap();
        assert!(mm.matrix().approx_eq(&ComplexMatrix::identity(4).scale_real(0.25), 0.0));

        let bad = XState { c14: C64::new(0.3, 0.0), ..XState::diagonal([0.1, 0.4, 0.4, 0.1]) };
        assert!(matches!(xstate_to_density(&bad), Err(Error::PositivityViolation(_))));
    }

    #[test]
    fn effective_beta_examples() {
        let q = |a: f64, b: f64| DensityMatrix::from_matrix(ComplexMatrix::from_real_diag(&[a, b])).unwrap();
        assert_eq!(effective_beta(&q(0.5, 0.5), 1.0).unwrap().beta, 0.0);
        // The six-digit populations only pin beta down to ~4e-6.
        assert!((effective_beta(&q(0.731059, 0.268941), 1.0).unwrap().beta - 1.0).abs() < 1e-5);
        assert!((effective_beta(&q(0.268941, 0.731059), 1.0).unwrap().beta + 1.0).abs() < 1e-5);
        let pg = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((effective_beta(&q(pg, 1.0 - pg), 1.0).unwrap().beta - 1.0).abs() < 1e-12);
        assert_eq!(effective_beta(&q(1.0, 0.0), 1.0).unwrap().beta, f64::INFINITY);

        let mut m = ComplexMatrix::from_real_diag(&[0.6, 0.4]);
        m[(0, 1)] = C64::new(0.1, 0.0);
        m[(1, 0)] = C64::new(0.1, 0.0);
        let coherent = DensityMatrix::from_matrix(m).unwrap();
        assert!(matches!(effective_beta(&coherent, 1.0), Err(Error::NotDiagonal(_))));
    }

    #[test]
    fn effective_beta_inverts_thermal_state() {
        // Beyond |beta omega| ~ 32 the minority population drops under 1e-14
        // and the fit returns the infinite sentinel instead.
        let q = Hamiltonian::qubit(1.3);
        for k in -60..=60 {
            let beta = k as f64 * 0.4;
            let t = thermal_state(&q, beta).unwrap();
            let fit = effective_beta(&t, 1.3).unwrap();
            assert!((fit.beta - beta).abs() < 1e-8, "beta {beta} -> {}", fit.beta);
            let p = fit.populations();
            assert!((p[0] - t.matrix()[(0, 0)].re).abs() < 1e-10);
        }
    }

    #[test]
    fn sampler_properties() {
        for seed in 0..200 {
            let (rho, beta) = locally_thermal_xstate_sampler(seed, 1.0);
            let (a, b) = rho.marginals().unwrap();
            assert!(a.matrix()[(0, 1)].norm() < 1e-12 && b.matrix()[(0, 1)].norm() < 1e-12);
            let ba = effective_beta(&a, 1.0).unwrap().beta;
            let bb = effective_beta(&b, 1.0).unwrap().beta;
            assert!((ba - bb).abs() < 1e-9);
            assert!((ba - beta).abs() < 1e-9);
            assert!(beta >= 0.0);
        }
        let (r1, _) = locally_thermal_xstate_sampler(42, 1.0);
        let (r2, _) = locally_thermal_xstate_sampler(42, 1.0);
        assert_eq!(r1, r2);
    }

    #[test]
    fn sampler_outputs_are_valid_states() {
        for seed in 0..10_000 {
            let (rho, _) = locally_thermal_xstate_sampler(seed, 1.0);
            DensityMatrix::new(rho.matrix().clone(), vec![2, 2]).unwrap();
        }
    }

    #[test]
    fn random_density_examples() {
        let pure = random_density_matrix(&[4], 1, 3).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-10);
        let full = random_density_matrix(&[2, 2], 4, 3).unwrap();
        assert!(full.spectrum()[0] > 1e-8);
        assert_eq!(full, random_density_matrix(&[2, 2], 4, 3).unwrap());
        DensityMatrix::new(full.matrix().clone(), vec![2, 2]).unwrap();
        assert!(random_density_matrix(&[2], 3, 0).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = seeded_rng(9);
        for d in 1..=6 {
            assert!(random_unitary(d, &mut rng).unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn state_validation_errors() {
        let m = ComplexMatrix::from_real_diag(&[0.7, 0.7]);
        assert!(matches!(DensityMatrix::from_matrix(m), Err(Error::InvalidState(_))));
        let m = ComplexMatrix::from_real_diag(&[1.2, -0.2]);
        assert!(matches!(DensityMatrix::from_matrix(m), Err(Error::InvalidState(_))));
        let mut m = ComplexMatrix::from_real_diag(&[0.5, 0.5]);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::from_matrix(m), Err(Error::NotHermitian { .. })));
        assert!(DensityMatrix::new(ComplexMatrix::identity(4).scale_real(0.25), vec![2, 3]).is_err());
    }

    #[test]
    fn local_hamiltonian_composition() {
        let h = Hamiltonian::two_qubit(1.0);
        assert_eq!(h.energies(), &[0.0, 1.0, 1.0, 2.0]);
        let parts = h.local_parts().unwrap();
        let id = ComplexMatrix::identity(2);
        let sum = &tensor(&parts[0], &id) + &tensor(&id, &parts[1]);
        assert!(sum.approx_eq(h.matrix(), 1e-12));
    }
}
