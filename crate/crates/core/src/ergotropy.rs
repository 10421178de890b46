//! Passive states, ergotropy, bound ergotropy and complete passivity.

use serde::Serialize;

use crate::correlations::shannon_entropy;
use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, C64};
use crate::states::{thermal_populations, thermal_state, DensityMatrix, Hamiltonian};

/// Values closer than this are treated as degenerate when ordering levels and
/// populations; ties keep the eigensolver's column order.
const TIE_TOL: f64 = 1e-13;

const BETA_BRACKET_START: f64 = 64.0;
const BETA_BRACKET_MAX: f64 = (1u64 << 20) as f64;
const BISECTION_MAX_ITER: usize = 200;
const ENTROPY_TOL: f64 = 1e-12;

/// Energies ascending and populations descending with their eigenvectors
/// (as matrix columns, in the same order).
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub energies: Vec<f64>,
    pub populations: Vec<f64>,
    pub energy_vectors: ComplexMatrix,
    pub population_vectors: ComplexMatrix,
}

impl SpectralData {
    pub fn new(rho: &DensityMatrix, h: &Hamiltonian) -> Result<Self> {
        if rho.dim() != h.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state is {}-dimensional, Hamiltonian is {}-dimensional",
                rho.dim(),
                h.dim()
            )));
        }
        let he = h.eigen();
        let e_order = tie_stable_order(&he.eigenvalues, false);
        let re = rho.eigen();
        let r_order = tie_stable_order(&re.eigenvalues, true);

        let n = h.dim();
        let energies = e_order.iter().map(|&k| he.eigenvalues[k]).collect();
        let populations = r_order.iter().map(|&k| re.eigenvalues[k].max(0.0)).collect();
        let energy_vectors = ComplexMatrix::from_fn(n, |i, j| he.eigenvectors[(i, e_order[j])]);
        let population_vectors = ComplexMatrix::from_fn(n, |i, j| re.eigenvectors[(i, r_order[j])]);
        Ok(Self { energies, populations, energy_vectors, population_vectors })
    }

    /// Sum_k r_k eps_k, the energy of the passive state.
    pub fn passive_energy(&self) -> f64 {
        self.populations.iter().zip(&self.energies).map(|(r, e)| r * e).sum()
    }
}

/// Indices of `values` (given ascending) ordered ascending or descending,
/// where runs of values within TIE_TOL keep their original index order.
fn tie_stable_order(values: &[f64], descending: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    if descending {
        idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    } else {
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    }
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && (values[idx[end]] - values[idx[end - 1]]).abs() <= TIE_TOL {
            end += 1;
        }
        idx[start..end].sort_unstable();
        start = end;
    }
    idx
}

#[derive(Debug, Clone)]
pub struct ErgotropyReport {
    pub ergotropy: f64,
    /// Same quantity from the overlap formula sum r_j eps_i (|<r_j|eps_i>|^2 - delta_ij).
    pub ergotropy_overlap_form: f64,
    pub bound_ergotropy: f64,
    pub passive_state: DensityMatrix,
    pub equal_entropy_beta: f64,
    pub optimal_unitary: ComplexMatrix,
}

impl ErgotropyReport {
    pub fn new(rho: &DensityMatrix, h: &Hamiltonian) -> Result<Self> {
        let sd = SpectralData::new(rho, h)?;
        let (passive, u) = passive_from_spectral(&sd, rho.dims().to_vec());
        let ergotropy = rho.expectation(h.matrix()) - sd.passive_energy();
        let ergotropy_overlap_form = overlap_form(&sd);
        let (thermal, beta) = equal_entropy_thermal(rho, h)?;
        let bound = sd.passive_energy() - thermal.expectation(h.matrix());
        Ok(Self {
            ergotropy,
            ergotropy_overlap_form,
            bound_ergotropy: bound,
            passive_state: passive,
            equal_entropy_beta: beta,
            optimal_unitary: u,
        })
    }

    pub fn total(&self) -> f64 {
        self.ergotropy + self.bound_ergotropy
    }
}

fn passive_from_spectral(sd: &SpectralData, dims: Vec<usize>) -> (DensityMatrix, ComplexMatrix) {
    let n = sd.energies.len();
    let ev = &sd.energy_vectors;
    let rv = &sd.population_vectors;
    let p = ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| ev[(i, k)] * sd.populations[k] * ev[(j, k)].conj()).sum());
    let u = ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| ev[(i, k)] * rv[(j, k)].conj()).sum());
    (DensityMatrix::from_parts_unchecked(p, dims), u)
}

fn overlap_form(sd: &SpectralData) -> f64 {
    let n = sd.energies.len();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            let ov: C64 = (0..n).map(|k| sd.population_vectors[(k, j)].conj() * sd.energy_vectors[(k, i)]).sum();
            let delta = if i == j { 1.0 } else { 0.0 };
            acc += sd.populations[j] * sd.energies[i] * (ov.norm_sqr() - delta);
        }
    }
    acc
}

/// Passive state P = sum_k r_k |eps_k><eps_k| and the unitary
/// U = sum_k |eps_k><r_k| that maps rho onto it.
pub fn passive_state(rho: &DensityMatrix, h: &Hamiltonian) -> Result<(DensityMatrix, ComplexMatrix)> {
    let sd = SpectralData::new(rho, h)?;
    Ok(passive_from_spectral(&sd, rho.dims().to_vec()))
}

/// tr{h (rho - P_rho)}.
pub fn ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> Result<f64> {
    let sd = SpectralData::new(rho, h)?;
    let e = rho.expectation(h.matrix()) - sd.passive_energy();
    debug_assert!((e - overlap_form(&sd)).abs() <= 1e-10 * e.abs().max(1.0));
    Ok(e)
}

/// Which sign of beta the equal-entropy search explores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaBranch {
    #[default]
    NonNegative,
    NonPositive,
}

/// Thermal state of `h` with the same entropy as `rho`, found by bisection
/// on beta >= 0. Zero entropy maps to beta = +inf.
pub fn equal_entropy_thermal(rho: &DensityMatrix, h: &Hamiltonian) -> Result<(DensityMatrix, f64)> {
    equal_entropy_thermal_on(rho, h, BetaBranch::NonNegative)
}

pub fn equal_entropy_thermal_on(rho: &DensityMatrix, h: &Hamiltonian, branch: BetaBranch) -> Result<(DensityMatrix, f64)> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!("state {} vs Hamiltonian {}", rho.dim(), h.dim())));
    }
    if h.is_trivial() {
        return Err(Error::DegenerateHamiltonian);
    }
    let target = shannon_entropy(&rho.spectrum());
    let beta = entropy_matching_beta(h.energies(), target, branch)?;
    let mut t = thermal_state(h, beta)?;
    if t.dims() != rho.dims() {
        t = DensityMatrix::from_parts_unchecked(t.into_matrix(), rho.dims().to_vec());
    }
    Ok((t, beta))
}

fn entropy_matching_beta(energies: &[f64], target: f64, branch: BetaBranch) -> Result<f64> {
    let sign = match branch {
        BetaBranch::NonNegative => 1.0,
        BetaBranch::NonPositive => -1.0,
    };
    let s_of = |b: f64| -> f64 { shannon_entropy(&thermal_populations(energies, sign * b).expect("finite beta")) };
    let d = energies.len() as f64;
    if target >= d.ln() - ENTROPY_TOL {
        return Ok(0.0);
    }
    let s_limit = s_of(f64::INFINITY);
    if target < 1e-12 || target <= s_limit + ENTROPY_TOL {
        return Ok(sign * f64::INFINITY);
    }
    let mut lo = 0.0;
    let mut hi = BETA_BRACKET_START;
    while s_of(hi) > target {
        if hi >= BETA_BRACKET_MAX {
            return Ok(sign * f64::INFINITY);
        }
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if s_of(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    let gap = (s_of(beta) - target).abs();
    if gap > ENTROPY_TOL {
        return Err(Error::EntropyMismatch(gap));
    }
    Ok(sign * beta)
}

/// tr{(P_rho - P_rho^th) h}.
pub fn bound_ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> Result<f64> {
    let sd = SpectralData::new(rho, h)?;
    let (thermal, _) = equal_entropy_thermal(rho, h)?;
    Ok(sd.passive_energy() - thermal.expectation(h.matrix()))
}

/// N (E + E_b) for `n_copies` copies processed jointly.
pub fn global_ergotropy(rho: &DensityMatrix, h: &Hamiltonian, n_copies: usize) -> Result<f64> {
    if n_copies == 0 {
        return Err(Error::InvalidParameter("number of copies must be at least 1".into()));
    }
    Ok(n_copies as f64 * (ergotropy(rho, h)? + bound_ergotropy(rho, h)?))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PassivityDiagnostic {
    pub completely_passive: bool,
    pub commutator_norm: f64,
    pub ergotropy: f64,
    pub bound_ergotropy: f64,
}

/// Thermal (completely passive) iff rho commutes with h and neither the
/// ergotropy nor the bound ergotropy exceed 1e-9.
pub fn is_completely_passive(rho: &DensityMatrix, h: &Hamiltonian) -> Result<PassivityDiagnostic> {
    const TOL: f64 = 1e-9;
    let commutator_norm = rho.matrix().commutator(h.matrix()).max_abs();
    let ergotropy = ergotropy(rho, h)?;
    let bound_ergotropy = match bound_ergotropy(rho, h) {
        Ok(b) => b,
        Err(Error::DegenerateHamiltonian) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(PassivityDiagnostic {
        completely_passive: commutator_norm <= TOL && ergotropy <= TOL && bound_ergotropy <= TOL,
        commutator_norm,
        ergotropy,
        bound_ergotropy,
    })
}
