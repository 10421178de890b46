//! Two qubits coupled to a common thermal bath.
//!
//! Basis ordering is |gg>, |ge>, |eg>, |ee> (index 2 q1 + q2, g = 0). The
//! master equation is
//!
//! d rho/dt = -i[H0 + Hd, rho]
//!          + sum_ij gamma_ij (n + 1) (s_j^- rho s_i^+ - {s_i^+ s_j^-, rho}/2)
//!          + sum_ij gamma_ij n       (s_j^+ rho s_i^- - {s_i^- s_j^+, rho}/2)
//!
//! with H0 = omega (s_1^+ s_1^- + s_2^+ s_2^-), Hd = f (s_1^+ s_2^- + s_2^+ s_1^-)
//! and n the thermal photon number at the bath temperature.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::{eigh, tensor, trace_distance, ComplexMatrix, C64};
use crate::states::DensityMatrix;

/// Stop once rho(t) and rho(t + window) are this close in trace distance.
pub const STEADY_TOL: f64 = 1e-10;
/// Largest admissible dt is this fraction of the fastest rate.
const STEP_FRACTION: f64 = 0.05;
/// Convergence window, in units of 1/gamma.
const WINDOW_DECAY_TIMES: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DissipationParams {
    pub omega: f64,
    /// Exchange coupling of the dipole-dipole term.
    pub f: f64,
    pub gamma: [[f64; 2]; 2],
    pub beta_e: f64,
}

impl DissipationParams {
    pub fn new(omega: f64, f: f64, gamma: [[f64; 2]; 2], beta_e: f64) -> Result<Self> {
        let p = Self { omega, f, gamma, beta_e };
        p.validate()?;
        Ok(p)
    }

    /// gamma_11 = gamma_22 = gamma_12 = gamma, f = 0.1 gamma.
    pub fn collective(omega: f64, gamma: f64, beta_e: f64) -> Result<Self> {
        Self::new(omega, 0.1 * gamma, [[gamma, gamma], [gamma, gamma]], beta_e)
    }

    /// gamma_12 = 0, f = 0.1 gamma.
    pub fn independent(omega: f64, gamma: f64, beta_e: f64) -> Result<Self> {
        Self::new(omega, 0.1 * gamma, [[gamma, 0.0], [0.0, gamma]], beta_e)
    }

    pub fn with_coupling(self, f: f64) -> Result<Self> {
        Self::new(self.omega, f, self.gamma, self.beta_e)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let g = self.gamma;
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return bad(format!("omega must be positive, got {}", self.omega));
        }
        if !self.f.is_finite() {
            return bad(format!("coupling f must be finite, got {}", self.f));
        }
        if !(self.beta_e > 0.0) || self.beta_e.is_nan() {
            return bad(format!("beta_e must be positive, got {}", self.beta_e));
        }
        if g.iter().flatten().any(|x| !x.is_finite()) || g[0][1] != g[1][0] {
            return bad(format!("gamma must be finite and symmetric, got {g:?}"));
        }
        if g[0][0] < 0.0 || g[1][1] < 0.0 || g[0][1] * g[0][1] > g[0][0] * g[1][1] * (1.0 + 1e-12) {
            return bad(format!("gamma must be positive semidefinite, got {g:?}"));
        }
        Ok(())
    }

    /// Mean thermal photon number 1 / (e^{beta_e omega} - 1).
    pub fn nbar(&self) -> f64 {
        1.0 / (self.beta_e * self.omega).exp_m1()
    }

    fn gamma_max(&self) -> f64 {
        self.gamma[0][0].max(self.gamma[1][1])
    }

    /// Largest time step accepted by [`evolve`].
    pub fn max_step(&self) -> f64 {
        let rate = (self.gamma_max() * (self.nbar() + 1.0)).max(self.omega).max(self.f.abs());
        STEP_FRACTION / rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyStateParams {
    pub c: f64,
    pub beta_e: f64,
    pub omega: f64,
}

fn lowering() -> [ComplexMatrix; 2] {
    let mut s = ComplexMatrix::zeros(2);
    s[(0, 1)] = C64::new(1.0, 0.0);
    let id = ComplexMatrix::identity(2);
    [tensor(&s, &id), tensor(&id, &s)]
}

/// Precomputed pieces of the generator: L(rho) = -i(K rho - rho K^dag) +
/// sum_k w_k A_k rho B_k^dag, where K is the non-Hermitian effective
/// Hamiltonian.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    k_eff: ComplexMatrix,
    k_eff_adj: ComplexMatrix,
    jumps: Vec<(ComplexMatrix, ComplexMatrix, f64)>,
}

impl Liouvillian {
    pub fn new(p: &DissipationParams) -> Self {
        let sm = lowering();
        let sp = [sm[0].adjoint(), sm[1].adjoint()];
        let n = p.nbar();
        let h0 = ComplexMatrix::from_real_diag(&[0.0, p.omega, p.omega, 2.0 * p.omega]);
        let hd = (&(&sp[0] * &sm[1]) + &(&sp[1] * &sm[0])).scale_real(p.f);
        let mut k_eff = &h0 + &hd;
        let mut jumps = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let g = p.gamma[i][j];
                if g == 0.0 {
                    continue;
                }
                let anti = &(&sp[i] * &sm[j]).scale_real(g * (n + 1.0)) + &(&sm[i] * &sp[j]).scale_real(g * n);
                k_eff = &k_eff - &anti.scale(C64::new(0.0, 0.5));
                jumps.push((sm[j].clone(), sm[i].clone(), g * (n + 1.0)));
                if n > 0.0 {
                    jumps.push((sp[j].clone(), sp[i].clone(), g * n));
                }
            }
        }
        let k_eff_adj = k_eff.adjoint();
        Self { k_eff, k_eff_adj, jumps }
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let coherent = &(&self.k_eff * rho) - &(rho * &self.k_eff_adj);
        let mut out = coherent.scale(C64::new(0.0, -1.0));
        for (a, b, w) in &self.jumps {
            out = &out + &(&(a * rho) * &b.adjoint()).scale_real(*w);
        }
        out
    }

    fn rk4_step(&self, rho: &ComplexMatrix, dt: f64) -> ComplexMatrix {
        let k1 = self.apply(rho);
        let k2 = self.apply(&(rho + &k1.scale_real(0.5 * dt)));
        let k3 = self.apply(&(rho + &k2.scale_real(0.5 * dt)));
        let k4 = self.apply(&(rho + &k3.scale_real(dt)));
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
        rho + &incr.scale_real(dt / 6.0)
    }
}

/// The generator applied once to `rho`.
pub fn liouvillian_apply(rho: &DensityMatrix, p: &DissipationParams) -> Result<ComplexMatrix> {
    rho.require_two_qubits()?;
    Ok(Liouvillian::new(p).apply(rho.matrix()))
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory always holds the initial state")
    }
}

/// Fixed-step RK4 from 0 to `t_final`, recording every step.
pub fn evolve(rho0: &DensityMatrix, p: &DissipationParams, t_final: f64, dt: f64) -> Result<Trajectory> {
    evolve_sampled(rho0, p, t_final, dt, 1)
}

/// As [`evolve`], recording every `record_every`-th step (and always the
/// last one). The step is shortened so that a whole number of steps ends at
/// `t_final`.
pub fn evolve_sampled(
    rho0: &DensityMatrix,
    p: &DissipationParams,
    t_final: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory> {
    rho0.require_two_qubits()?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_final must be non-negative, got {t_final}")));
    }
    let max_dt = p.max_step();
    if !(dt > 0.0) || dt > max_dt {
        return Err(Error::StepTooLarge { suggested: max_dt });
    }
    let steps = (t_final / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t_final / steps as f64 };
    let every = record_every.max(1);
    let l = Liouvillian::new(p);

    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut rho = rho0.matrix().clone();
    for k in 1..=steps {
        rho = l.rk4_step(&rho, h);
        if k % every == 0 || k == steps {
            states.push(checked_state(&rho, h)?);
            times.push(k as f64 * h);
        }
    }
    Ok(Trajectory { times, states })
}

fn checked_state(rho: &ComplexMatrix, dt: f64) -> Result<DensityMatrix> {
    let m = rho.hermitize();
    let min = eigh(&m)?.eigenvalues[0];
    let tr = m.trace().re;
    if min < -1e-9 || (tr - 1.0).abs() > 1e-9 || !tr.is_finite() {
        return Err(Error::StepTooLarge { suggested: 0.5 * dt });
    }
    Ok(DensityMatrix::from_parts_unchecked(m, vec![2, 2]))
}

/// Integrates until rho(t) and rho(t + 10/gamma) agree to [`STEADY_TOL`] in
/// trace distance. Returns the state and the time reached.
pub fn evolve_to_steady(rho0: &DensityMatrix, p: &DissipationParams, dt: f64, t_max: f64) -> Result<(DensityMatrix, f64)> {
    let g = p.gamma_max();
    if !(g > 0.0) {
        return Err(Error::InvalidParameter("decay rates vanish; no steady state is approached".into()));
    }
    let window = WINDOW_DECAY_TIMES / g;
    let mut current = rho0.clone();
    let mut t = 0.0;
    while t < t_max {
        let next = evolve_sampled(&current, p, window, dt, usize::MAX)?.final_state().clone();
        t += window;
        if trace_distance(current.matrix(), next.matrix())? <= STEADY_TOL {
            return Ok((next, t));
        }
        current = next;
    }
    Err(Error::NotConverged(t))
}

/// |psi_-> = (|ge> - |eg>)/sqrt2
pub fn psi_minus() -> [C64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(0.0, 0.0)]
}

/// |psi_+> = (|ge> + |eg>)/sqrt2
pub fn psi_plus() -> [C64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)]
}

/// (1 - c)|psi_-><psi_-| + c (e^{-2x}|ee><ee| + e^{-x}|psi_+><psi_+| + |gg><gg|) / Z,
/// x = beta_e omega, Z = 1 + e^{-x} + e^{-2x}.
pub fn steady_state(s: &SteadyStateParams) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&s.c) {
        return Err(Error::InvalidParameter(format!("c must lie in [0, 1], got {}", s.c)));
    }
    if !(s.beta_e > 0.0) || !(s.omega > 0.0) {
        return Err(Error::InvalidParameter(format!("beta_e and omega must be positive, got {} and {}", s.beta_e, s.omega)));
    }
    let e1 = (-s.beta_e * s.omega).exp();
    let e2 = e1 * e1;
    let z = 1.0 + e1 + e2;
    let (gg, tp, ee) = (s.c / z, s.c * e1 / z, s.c * e2 / z);
    let tm = 1.0 - s.c;
    // psi_+ and psi_- share the |ge>, |eg> block.
    let mut m = ComplexMatrix::from_real_diag(&[gg, 0.5 * (tp + tm), 0.5 * (tp + tm), ee]);
    m[(1, 2)] = C64::new(0.5 * (tp - tm), 0.0);
    m[(2, 1)] = C64::new(0.5 * (tp - tm), 0.0);
    Ok(DensityMatrix::from_parts_unchecked(m, vec![2, 2]))
}

/// 1 - <psi_-|rho|psi_->: weight outside the dark state, conserved by
/// the collective dynamics.
pub fn c_parameter(rho: &DensityMatrix) -> Result<f64> {
    rho.require_two_qubits()?;
    let v = psi_minus();
    let rv = rho.matrix().mul_vec(&v);
    let dark: f64 = v.iter().zip(&rv).map(|(a, b)| (a.conj() * b).re).sum();
    Ok((1.0 - dark).clamp(0.0, 1.0))
}

/// c of the Gibbs state at beta_e: (1 + e^{-x} + e^{-2x}) / (1 + e^{-x})^2.
pub fn thermal_c(beta_e: f64, omega: f64) -> f64 {
    let e = (-beta_e * omega).exp();
    (1.0 + e + e * e) / ((1.0 + e) * (1.0 + e))
}

/// Local inverse temperature of either marginal of the steady state:
/// (1/omega) ln[(1 + 2cosh x + 2c sinh x) / (1 + 2cosh x - 2c sinh x)].
pub fn local_beta_formula(c: f64, beta_e: f64, omega: f64) -> f64 {
    // Numerator and denominator scaled by e^{-x} to survive large x.
    let e = (-beta_e * omega).exp();
    let e2 = e * e;
    let base = e + 1.0 + e2;
    let shift = c * (1.0 - e2);
    ((base + shift) / (base - shift)).ln() / omega
}
