//! Entropic quantities and the identities linking ergotropy to correlations.
//!
//! Every identity is evaluated along two independent routes: the ergotropy
//! comes from the spectral construction in [`crate::ergotropy`], while the
//! right-hand sides are assembled from entropies and relative entropies. The
//! reported residual is the gap between the two.
//!
//! All identities are carried in the `beta * energy` form (nats); quotients
//! by beta are only formed for reporting and only when beta is non-zero.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::Serialize;

use crate::ergotropy::{equal_entropy_thermal, ErgotropyReport, SpectralData};
use crate::error::{Error, Result};
use crate::qmath::{eigh, log_regularized, tensor, ComplexMatrix, C64, EIGEN_FLOOR};
use crate::states::{effective_beta, thermal_state, DensityMatrix, Hamiltonian};

/// Weight outside the reference support above which D(rho||sigma) = +inf.
const SUPPORT_TOL: f64 = 1e-8;
/// |beta| below this counts as infinite temperature.
const BETA_ZERO_TOL: f64 = 1e-12;
/// Relative tolerance for the two marginals to share one temperature.
const COMMON_BETA_TOL: f64 = 1e-8;

/// -sum p ln p over entries above the eigenvalue floor.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > EIGEN_FLOOR).map(|&x| x * x.ln()).sum::<f64>()
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.spectrum())
}

/// D(rho||sigma) = tr{rho ln rho - rho ln sigma}; `+inf` when rho carries
/// weight above 1e-8 outside the support of sigma.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    relative_entropy_matrices(rho.matrix(), sigma.matrix())
}

pub(crate) fn relative_entropy_matrices(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", rho.dim(), sigma.dim())));
    }
    let se = eigh(sigma)?;
    let n = rho.dim();
    let mut outside = 0.0;
    let mut cross = 0.0;
    for k in 0..n {
        let v = se.vector(k);
        let rv = rho.mul_vec(&v);
        let w: f64 = v.iter().zip(&rv).map(|(a, b)| (a.conj() * b).re).sum();
        let lam = se.eigenvalues[k];
        if lam < EIGEN_FLOOR {
            outside += w;
        }
        cross += w * lam.max(EIGEN_FLOOR).ln();
    }
    if outside > SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    let s_rho = shannon_entropy(&eigh(rho)?.eigenvalues.iter().map(|l| l.max(0.0)).collect::<Vec<_>>());
    Ok(-s_rho - cross)
}

/// S(rho_A) + S(rho_B) - S(rho).
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    rho.require_bipartite()?;
    let (a, b) = rho.marginals()?;
    Ok(von_neumann_entropy(&a) + von_neumann_entropy(&b) - von_neumann_entropy(rho))
}

/// sum_i S(rho_i) - S(rho) over all tensor factors of `rho`.
pub fn multipartite_mutual_information(rho: &DensityMatrix) -> Result<f64> {
    let k = rho.dims().len();
    if k < 2 {
        return Err(Error::DimensionMismatch("need at least two factors".into()));
    }
    let mut s = -von_neumann_entropy(rho);
    for i in 0..k {
        s += von_neumann_entropy(&rho.marginal(i)?);
    }
    Ok(s)
}

/// rho_A ⊗ rho_B
pub fn product_of_marginals(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let (a, b) = rho.marginals()?;
    Ok(a.tensor(&b))
}

/// chi = rho - rho_A ⊗ rho_B.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub chi: ComplexMatrix,
}

impl CorrelationMatrix {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        let prod = product_of_marginals(rho)?;
        Ok(Self { chi: rho.matrix() - prod.matrix() })
    }
}

/// Inverse temperatures of the two marginals, each fitted against its local
/// Hamiltonian (qubit parts only).
pub fn local_betas(rho: &DensityMatrix, h: &Hamiltonian) -> Result<(f64, f64)> {
    rho.require_bipartite()?;
    let parts = h
        .local_parts()
        .ok_or_else(|| Error::InvalidParameter("Hamiltonian has no local decomposition".into()))?;
    if parts.len() != 2 || parts.iter().map(|p| p.dim()).collect::<Vec<_>>() != rho.dims() {
        return Err(Error::DimensionMismatch("local Hamiltonian parts do not match the state factors".into()));
    }
    let mut betas = [0.0; 2];
    for (k, part) in parts.iter().enumerate() {
        if part.dim() != 2 {
            return Err(Error::DimensionMismatch("temperature fitting needs qubit factors".into()));
        }
        let pe = eigh(part)?;
        let omega = pe.eigenvalues[1] - pe.eigenvalues[0];
        let marginal = rho.marginal(k)?;
        let in_basis = marginal.matrix().conjugate_by(&pe.eigenvectors);
        let q = DensityMatrix::from_parts_unchecked(in_basis, vec![2]);
        betas[k] = effective_beta(&q, omega)?.beta;
    }
    Ok((betas[0], betas[1]))
}

fn identity_applicable(beta: f64) -> bool {
    beta.is_finite() && beta.abs() >= BETA_ZERO_TOL
}

/// Common local beta plus any warnings about mismatched or negative temperatures.
fn common_beta(rho: &DensityMatrix, h: &Hamiltonian, warnings: &mut Vec<String>) -> Result<f64> {
    let (ba, bb) = local_betas(rho, h)?;
    let agree = if ba.is_infinite() || bb.is_infinite() {
        ba == bb
    } else {
        (ba - bb).abs() <= COMMON_BETA_TOL * ba.abs().max(bb.abs()).max(1.0)
    };
    if !agree {
        warnings.push(format!("marginals fit different temperatures: beta_A = {ba}, beta_B = {bb}"));
    }
    if ba < 0.0 {
        warnings.push(format!("negative local temperature (population inversion): beta = {ba}"));
    }
    Ok(ba)
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub mutual_information: f64,
    /// D(P_rho || rho_A ⊗ rho_B)
    pub relative_entropy_passive_to_product: f64,
    /// Projective-measurement discord; an upper bound on the POVM value.
    pub discord: Option<f64>,
    pub holevo: Option<f64>,
    pub beta: Option<f64>,
    pub ergotropy: f64,
    /// (I - D) / beta; absent when beta is zero, infinite or unknown.
    pub ergotropy_via_identity: Option<f64>,
    /// |beta E - I + D|; absent when beta is infinite or unknown.
    pub residual: Option<f64>,
    pub warnings: Vec<String>,
}

/// beta E(rho) = I(A:B) - D(P_rho || rho_A ⊗ rho_B) for locally thermal rho.
///
/// The local beta is fitted from the marginals. Non-thermal or mismatched
/// marginals produce warnings rather than errors; the identity fields are
/// left empty when no finite non-zero beta is available.
pub fn main_identity(rho: &DensityMatrix, h: &Hamiltonian) -> Result<CorrelationReport> {
    let mut warnings = Vec::new();
    let beta = match common_beta(rho, h, &mut warnings) {
        Ok(b) => Some(b),
        Err(Error::NotDiagonal(c)) => {
            warnings.push(format!("marginals are not thermal: coherence {c:.3e} in the energy basis"));
            None
        }
        Err(e) => return Err(e),
    };
    main_identity_inner(rho, h, beta, warnings)
}

/// Same as [`main_identity`] with a caller-supplied beta.
pub fn main_identity_at(rho: &DensityMatrix, h: &Hamiltonian, beta: f64) -> Result<CorrelationReport> {
    main_identity_inner(rho, h, Some(beta), Vec::new())
}

fn main_identity_inner(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    beta: Option<f64>,
    mut warnings: Vec<String>,
) -> Result<CorrelationReport> {
    rho.require_bipartite()?;
    let sd = SpectralData::new(rho, h)?;
    let ergotropy = rho.expectation(h.matrix()) - sd.passive_energy();
    let passive = passive_matrix(&sd);

    let mi = mutual_information(rho)?;
    let product = product_of_marginals(rho)?;
    let d = relative_entropy_matrices(&passive, product.matrix())?;

    let rhs = mi - d;
    let (via, residual) = match beta {
        Some(b) if identity_applicable(b) => (Some(rhs / b), Some((b * ergotropy - rhs).abs())),
        // At beta = 0 the identity degenerates to 0 = I - D, still checkable.
        Some(b) if b.is_finite() => {
            warnings.push(format!("beta = {b}: ergotropy cannot be recovered from the identity"));
            (None, Some(rhs.abs()))
        }
        Some(b) => {
            warnings.push(format!("identity not applicable at beta = {b}"));
            (None, None)
        }
        None => (None, None),
    };
    Ok(CorrelationReport {
        mutual_information: mi,
        relative_entropy_passive_to_product: d,
        discord: None,
        holevo: None,
        beta,
        ergotropy,
        ergotropy_via_identity: via,
        residual,
        warnings,
    })
}

fn passive_matrix(sd: &SpectralData) -> ComplexMatrix {
    let n = sd.energies.len();
    let ev = &sd.energy_vectors;
    ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| ev[(i, k)] * sd.populations[k] * ev[(j, k)].conj()).sum())
}

/// [`main_identity`] plus discord (measured on B) when both factors are qubits.
pub fn correlation_report(rho: &DensityMatrix, h: &Hamiltonian) -> Result<CorrelationReport> {
    let mut r = main_identity(rho, h)?;
    if rho.dims() == [2, 2] {
        let dr = discord(rho, MeasuredSide::B)?;
        r.discord = Some(dr.discord);
        r.holevo = Some(dr.holevo);
    }
    Ok(r)
}

/// |beta tr{(rho1 - rho2) H} - [D(rho1||rho_beta) - D(rho2||rho_beta)]| for
/// two states of equal entropy.
pub fn equal_entropy_identity(rho1: &DensityMatrix, rho2: &DensityMatrix, h: &Hamiltonian, beta: f64) -> Result<f64> {
    let gap = (von_neumann_entropy(rho1) - von_neumann_entropy(rho2)).abs();
    if gap > 1e-8 {
        return Err(Error::EntropyMismatch(gap));
    }
    if !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be finite, got {beta}")));
    }
    let gibbs = thermal_state(h, beta)?;
    let lhs = beta * (rho1.expectation(h.matrix()) - rho2.expectation(h.matrix()));
    let d1 = relative_entropy_matrices(rho1.matrix(), gibbs.matrix())?;
    let d2 = relative_entropy_matrices(rho2.matrix(), gibbs.matrix())?;
    Ok((lhs - (d1 - d2)).abs())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LandauerSlacks {
    pub beta: f64,
    /// I - beta E
    pub basic: f64,
    /// I - beta (E + E_b)
    pub tight: f64,
}

/// Slacks of beta E <= I and beta (E + E_b) <= I at the fitted local beta.
pub fn inverse_landauer_check(rho: &DensityMatrix, h: &Hamiltonian) -> Result<LandauerSlacks> {
    let mut w = Vec::new();
    let beta = common_beta(rho, h, &mut w)?;
    let mi = mutual_information(rho)?;
    let rep = ErgotropyReport::new(rho, h)?;
    let scaled = |x: f64| if x == 0.0 { 0.0 } else { beta * x };
    Ok(LandauerSlacks { beta, basic: mi - scaled(rep.ergotropy), tight: mi - scaled(rep.total()) })
}

/// |beta (E + E_b) - I + D(P_rho^th || rho_A ⊗ rho_B)|.
pub fn bound_identity(rho: &DensityMatrix, h: &Hamiltonian) -> Result<f64> {
    let mut w = Vec::new();
    let beta = common_beta(rho, h, &mut w)?;
    if !identity_applicable(beta) {
        return Err(Error::BetaZero);
    }
    let rep = ErgotropyReport::new(rho, h)?;
    let (pth, _) = equal_entropy_thermal(rho, h)?;
    let mi = mutual_information(rho)?;
    let product = product_of_marginals(rho)?;
    let d = relative_entropy_matrices(pth.matrix(), product.matrix())?;
    Ok((beta * rep.total() - (mi - d)).abs())
}

/// Which qubit is measured in the discord optimisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeasuredSide {
    A,
    B,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiscordResult {
    pub discord: f64,
    /// J: classical correlation accessible by the optimal projective measurement.
    pub holevo: f64,
    pub theta: f64,
    pub phi: f64,
    pub mutual_information: f64,
}

const DISCORD_GRID: usize = 64;
const NM_TOL: f64 = 1e-8;
const NM_MAX_ITER: usize = 1000;

/// Two-qubit discord D = I - J, with J = S(rho_unmeasured) minus the minimum
/// average conditional entropy over rank-one projective measurements
/// {|n><n|, |-n><-n|} on the measured qubit. The Bloch direction n is searched
/// on a 64x64 grid over the upper hemisphere, then refined with Nelder-Mead
/// from the three best grid points.
pub fn discord(rho: &DensityMatrix, side: MeasuredSide) -> Result<DiscordResult> {
    rho.require_two_qubits()?;
    let m = match side {
        MeasuredSide::B => rho.matrix().clone(),
        MeasuredSide::A => swap_qubits(rho.matrix()),
    };
    let unmeasured = DensityMatrix::from_parts_unchecked(m.clone(), vec![2, 2]).marginal(0)?;
    let s_unmeasured = von_neumann_entropy(&unmeasured);
    let mi = mutual_information(rho)?;

    let f = |x: [f64; 2]| conditional_entropy(&m, x[0], x[1]);
    let mut grid: Vec<(f64, [f64; 2])> = Vec::with_capacity(DISCORD_GRID * DISCORD_GRID);
    for i in 0..DISCORD_GRID {
        let theta = FRAC_PI_2 * i as f64 / (DISCORD_GRID - 1) as f64;
        for j in 0..DISCORD_GRID {
            let phi = TAU * j as f64 / DISCORD_GRID as f64;
            grid.push((f([theta, phi]), [theta, phi]));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));

    let step = [FRAC_PI_2 / (DISCORD_GRID - 1) as f64, TAU / DISCORD_GRID as f64];
    let mut best = grid[0];
    for &(_, start) in grid.iter().take(3) {
        let (val, x) = nelder_mead_2d(&f, start, step);
        if val < best.0 {
            best = (val, x);
        }
    }
    let holevo = s_unmeasured - best.0;
    let (theta, phi) = canonical_direction(best.1[0], best.1[1]);
    Ok(DiscordResult { discord: mi - holevo, holevo, theta, phi, mutual_information: mi })
}

/// Exchanges the two qubit factors of a 4x4 matrix.
fn swap_qubits(m: &ComplexMatrix) -> ComplexMatrix {
    let p = |i: usize| (i % 2) * 2 + i / 2;
    ComplexMatrix::from_fn(4, |i, j| m[(p(i), p(j))])
}

/// sum_b p_b S(rho_{A|b}) for the projective measurement along (theta, phi) on B.
fn conditional_entropy(m: &ComplexMatrix, theta: f64, phi: f64) -> f64 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    let basis = [[C64::new(c, 0.0), e * s], [C64::new(s, 0.0), -e * c]];
    let mut total = 0.0;
    for b in &basis {
        // Unnormalised conditional state <b|_B rho |b>_B on A.
        let mut blk = [[C64::new(0.0, 0.0); 2]; 2];
        for (a, row) in blk.iter_mut().enumerate() {
            for (a2, entry) in row.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..2 {
                    for l in 0..2 {
                        acc += b[k].conj() * m[(2 * a + k, 2 * a2 + l)] * b[l];
                    }
                }
                *entry = acc;
            }
        }
        let p = blk[0][0].re + blk[1][1].re;
        if p <= EIGEN_FLOOR {
            continue;
        }
        let mean = 0.5 * p;
        let half_gap = ((0.5 * (blk[0][0].re - blk[1][1].re)).powi(2) + blk[0][1].norm_sqr()).sqrt();
        for lam in [mean + half_gap, mean - half_gap] {
            if lam > EIGEN_FLOOR {
                total -= lam * (lam / p).ln();
            }
        }
    }
    total
}

/// Maps a Bloch direction to the upper hemisphere representative
/// (the measurement along -n is the same as along n).
fn canonical_direction(theta: f64, phi: f64) -> (f64, f64) {
    let (x, y, z) = (theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
    let (x, y, z) = if z < 0.0 { (-x, -y, -z) } else { (x, y, z) };
    let th = z.clamp(-1.0, 1.0).acos();
    let ph = y.atan2(x).rem_euclid(TAU);
    (th, ph)
}

fn nelder_mead_2d(f: &impl Fn([f64; 2]) -> f64, start: [f64; 2], step: [f64; 2]) -> (f64, [f64; 2]) {
    let mut simplex = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut vals = simplex.map(f);
    for _ in 0..NM_MAX_ITER {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.map(|k| simplex[k]);
        vals = order.map(|k| vals[k]);
        if vals[2] - vals[0] <= NM_TOL
            && (0..2).all(|d| (simplex[1][d] - simplex[0][d]).abs().max((simplex[2][d] - simplex[0][d]).abs()) < 1e-7)
        {
            break;
        }
        let centroid = [0.5 * (simplex[0][0] + simplex[1][0]), 0.5 * (simplex[0][1] + simplex[1][1])];
        let along = |t: f64| [centroid[0] + t * (simplex[2][0] - centroid[0]), centroid[1] + t * (simplex[2][1] - centroid[1])];
        let xr = along(-1.0);
        let fr = f(xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            if fe < fr {
                simplex[2] = xe;
                vals[2] = fe;
            } else {
                simplex[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            simplex[2] = xr;
            vals[2] = fr;
        } else {
            let (xc, fc) = if fr < vals[2] {
                let xc = along(-0.5);
                (xc, f(xc))
            } else {
                let xc = along(0.5);
                (xc, f(xc))
            };
            if fc < vals[2].min(fr) {
                simplex[2] = xc;
                vals[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = [
                        simplex[0][0] + 0.5 * (simplex[k][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[k][1] - simplex[0][1]),
                    ];
                    vals[k] = f(simplex[k]);
                }
            }
        }
    }
    let k = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    (vals[k], simplex[k])
}

/// For zero-ergotropy states: |D + J - D(P_rho || rho_A ⊗ rho_B)|.
pub fn zero_ergotropy_condition(rho: &DensityMatrix, h: &Hamiltonian) -> Result<f64> {
    let report = main_identity(rho, h)?;
    if report.ergotropy.abs() > 1e-8 {
        return Err(Error::NotZeroErgotropy(report.ergotropy));
    }
    let dr = discord(rho, MeasuredSide::B)?;
    Ok((dr.discord + dr.holevo - report.relative_entropy_passive_to_product).abs())
}

/// Terms of beta E = I - D(P||rho_beta) + <ln(rho_A⊗rho_B) - ln rho_beta>_chi
/// + D(rho_A⊗rho_B || rho_beta) for an arbitrary bipartite state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GeneralIdentity {
    pub beta: f64,
    /// beta E from the spectral ergotropy.
    pub lhs: f64,
    pub mutual_information: f64,
    pub passive_to_gibbs: f64,
    pub chi_term: f64,
    pub product_to_gibbs: f64,
    pub residual: f64,
}

pub fn general_state_identity(rho: &DensityMatrix, h: &Hamiltonian, beta: f64) -> Result<GeneralIdentity> {
    rho.require_bipartite()?;
    if !identity_applicable(beta) {
        return Err(Error::BetaZero);
    }
    let sd = SpectralData::new(rho, h)?;
    let lhs = beta * (rho.expectation(h.matrix()) - sd.passive_energy());

    let gibbs = thermal_state(h, beta)?;
    let product = product_of_marginals(rho)?;
    let passive = passive_matrix(&sd);
    let mi = mutual_information(rho)?;
    let passive_to_gibbs = relative_entropy_matrices(&passive, gibbs.matrix())?;
    let product_to_gibbs = relative_entropy_matrices(product.matrix(), gibbs.matrix())?;
    if !passive_to_gibbs.is_finite() || !product_to_gibbs.is_finite() {
        return Err(Error::SupportViolation(f64::INFINITY));
    }
    let chi = CorrelationMatrix::new(rho)?.chi;
    let log_diff = &log_regularized(product.matrix())? - &log_regularized(gibbs.matrix())?;
    let chi_term = chi.trace_product_re(&log_diff);

    let rhs = mi - passive_to_gibbs + chi_term + product_to_gibbs;
    Ok(GeneralIdentity {
        beta,
        lhs,
        mutual_information: mi,
        passive_to_gibbs,
        chi_term,
        product_to_gibbs,
        residual: (lhs - rhs).abs(),
    })
}

/// F_beta(rho) - F_beta(rho_A,beta ⊗ rho_B,beta): the maximum work with access
/// to a bath at inverse temperature beta, where F = <H> - S / beta.
pub fn bath_assisted_work(rho: &DensityMatrix, h: &Hamiltonian, beta: f64) -> Result<f64> {
    if !identity_applicable(beta) {
        return Err(Error::BetaZero);
    }
    let parts = h
        .local_parts()
        .ok_or_else(|| Error::InvalidParameter("Hamiltonian has no local decomposition".into()))?;
    let locals: Vec<DensityMatrix> = parts
        .iter()
        .map(|p| thermal_state(&Hamiltonian::new(p.clone())?, beta))
        .collect::<Result<_>>()?;
    let reference = locals.iter().skip(1).fold(locals[0].clone(), |acc, s| acc.tensor(s));
    let free = |s: &DensityMatrix| s.expectation(h.matrix()) - von_neumann_entropy(s) / beta;
    Ok(free(rho) - free(&reference))
}

/// rho_A ⊗ rho_B as a plain matrix (exposed for tests and the CLI).
pub fn product_matrix(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let (a, b) = rho.marginals()?;
    Ok(tensor(a.matrix(), b.matrix()))
}
