//! Driven work extraction, the time-averaged energy spread of the protocol and
//! the resulting speed-limit and average-power bounds.
//!
//! A protocol adds Gamma(t) = phi'(t) e^{-iHt} Lambda e^{iHt} to the
//! self-Hamiltonian H. In the frame rotating with H the total Hamiltonian is
//! H + phi'(t) Lambda, whose two pieces need not commute; but the state only
//! feels e^{-i Lambda phi(t)} there, because the H part is removed by the frame
//! change. Hence U(t) = e^{-iHt} e^{-i Lambda phi(t)}, and with phi(tau) = tau
//! the endpoint is e^{-iH tau} e^{-i Lambda tau}.

use std::f64::consts::PI;

use serde::Serialize;

use crate::correlations::{main_identity, mutual_information};
use crate::ergotropy::{ergotropy, passive_state};
use crate::error::{Error, Result};
use crate::qmath::{
    bures_angle, eigh, exp_i, matrix_fn, matrix_log_unitary, trace_distance, ComplexMatrix, HermitianEigen,
};
use crate::states::{DensityMatrix, Hamiltonian};

/// Fewest propagator steps accepted by [`evolve_driven`].
pub const MIN_DRIVEN_STEPS: usize = 1000;
/// Fewest quadrature points accepted by [`time_avg_variance`].
pub const MIN_QUADRATURE_POINTS: usize = 200;
pub const DEFAULT_QUADRATURE_POINTS: usize = 401;
/// Largest tolerated |U^dag U - 1| before renormalisation.
const UNITARITY_TOL: f64 = 1e-6;
/// States closer than this to their passive state get the identity as
/// target unitary.
const PASSIVE_TOL: f64 = 1e-12;
/// Bures angles at or below this count as zero.
const BURES_ZERO: f64 = 1e-10;

/// phi(t) rising from 0 to tau with vanishing slope at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// tau (3 s^2 - 2 s^3), s = t / tau
    #[default]
    Smoothstep,
    /// tau sin^2(pi t / 2 tau)
    Sinusoidal,
}

impl Schedule {
    pub fn phi(self, t: f64, tau: f64) -> f64 {
        let s = t / tau;
        match self {
            Schedule::Smoothstep => tau * s * s * (3.0 - 2.0 * s),
            Schedule::Sinusoidal => tau * (0.5 * PI * s).sin().powi(2),
        }
    }

    pub fn phi_dot(self, t: f64, tau: f64) -> f64 {
        let s = t / tau;
        match self {
            Schedule::Smoothstep => 6.0 * s * (1.0 - s),
            Schedule::Sinusoidal => 0.5 * PI * (PI * s).sin(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExtractionProtocol {
    pub tau: f64,
    pub lambda_op: ComplexMatrix,
    pub schedule: Schedule,
    pub h_self: Hamiltonian,
    lambda_eigen: HermitianEigen,
}

impl ExtractionProtocol {
    /// Gamma(t)
    pub fn gamma(&self, t: f64) -> ComplexMatrix {
        let rot = exp_i(self.h_self.eigen(), -t);
        self.lambda_op.transform(&rot).scale_real(self.schedule.phi_dot(t, self.tau))
    }

    /// H + Gamma(t)
    pub fn total_hamiltonian(&self, t: f64) -> ComplexMatrix {
        self.h_self.matrix() + &self.gamma(t)
    }

    /// e^{-i Lambda phi(t)}
    pub fn interaction_unitary(&self, t: f64) -> ComplexMatrix {
        exp_i(&self.lambda_eigen, -self.schedule.phi(t, self.tau))
    }

    /// e^{-iHt} e^{-i Lambda phi(t)}
    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        &exp_i(self.h_self.eigen(), -t) * &self.interaction_unitary(t)
    }
}

/// Protocol with the default smoothstep schedule.
pub fn build_protocol(rho: &DensityMatrix, h: &Hamiltonian, tau: f64) -> Result<ExtractionProtocol> {
    build_protocol_with(rho, h, tau, Schedule::Smoothstep)
}

/// The endpoint unitary is e^{-iH tau} U0 with U0 = sum_k |eps_k><r_k|
/// (the phase freedom of U0 absorbs e^{-iH tau}), so Lambda = -log(U0) / tau
/// and a passive input gets Lambda = 0.
pub fn build_protocol_with(rho: &DensityMatrix, h: &Hamiltonian, tau: f64, schedule: Schedule) -> Result<ExtractionProtocol> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    let (passive, u0) = passive_state(rho, h)?;
    let lambda_op = if trace_distance(rho.matrix(), passive.matrix())? <= PASSIVE_TOL {
        ComplexMatrix::zeros(h.dim())
    } else {
        matrix_log_unitary(&u0)?.scale_real(-1.0 / tau)
    };
    let lambda_eigen = eigh(&lambda_op)?;
    Ok(ExtractionProtocol { tau, lambda_op, schedule, h_self: h.clone(), lambda_eigen })
}

#[derive(Debug, Clone)]
pub struct DrivenEvolution {
    pub final_state: DensityMatrix,
    /// tr{H rho} - tr{H rho(tau)}
    pub work: f64,
    /// (t, tr{H rho(t)}) at up to 101 evenly spaced times.
    pub samples: Vec<(f64, f64)>,
}

/// Integrates dU/dt = -i (H + Gamma(t)) U with RK4, restoring unitarity by
/// polar decomposition after every step.
pub fn evolve_driven(rho: &DensityMatrix, protocol: &ExtractionProtocol, n_steps: usize) -> Result<DrivenEvolution> {
    if n_steps < MIN_DRIVEN_STEPS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_DRIVEN_STEPS} steps, got {n_steps}")));
    }
    let h = protocol.h_self.matrix();
    let dt = protocol.tau / n_steps as f64;
    let record_every = (n_steps / 100).max(1);
    let minus_i = crate::qmath::C64::new(0.0, -1.0);
    let rhs = |t: f64, u: &ComplexMatrix| (&protocol.total_hamiltonian(t) * u).scale(minus_i);

    let mut u = ComplexMatrix::identity(h.dim());
    let mut samples = vec![(0.0, rho.expectation(h))];
    for k in 0..n_steps {
        let t = k as f64 * dt;
        let k1 = rhs(t, &u);
        let k2 = rhs(t + 0.5 * dt, &(&u + &k1.scale_real(0.5 * dt)));
        let k3 = rhs(t + 0.5 * dt, &(&u + &k2.scale_real(0.5 * dt)));
        let k4 = rhs(t + dt, &(&u + &k3.scale_real(dt)));
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
        u = &u + &incr.scale_real(dt / 6.0);

        let dev = u.unitarity_deviation();
        if dev > UNITARITY_TOL {
            return Err(Error::UnitarityLoss(dev));
        }
        let gram = (&u.adjoint() * &u).hermitize();
        u = &u * &matrix_fn(&gram, |l| 1.0 / l.sqrt())?;

        if (k + 1) % record_every == 0 || k + 1 == n_steps {
            samples.push(((k + 1) as f64 * dt, rho.evolve_unitary(&u).expectation(h)));
        }
    }
    let final_state = rho.evolve_unitary(&u);
    let work = rho.expectation(h) - final_state.expectation(h);
    Ok(DrivenEvolution { final_state, work, samples })
}

/// Values of the rotating-frame quantities on a Simpson grid over [0, tau].
struct Quadrature {
    tau: f64,
    weights: Vec<f64>,
    /// <H + Gamma(t)>
    energy: Vec<f64>,
    /// <(H + Gamma(t))^2> - <H + Gamma(t)>^2, clipped at zero
    variance: Vec<f64>,
    /// <Gamma(t)>
    drive: Vec<f64>,
    /// sqrt tr{(H + Gamma(t))^2}
    norm: Vec<f64>,
}

impl Quadrature {
    fn new(rho: &DensityMatrix, protocol: &ExtractionProtocol, h_self: &ComplexMatrix, points: usize) -> Result<Self> {
        if points < MIN_QUADRATURE_POINTS {
            return Err(Error::InvalidParameter(format!(
                "need at least {MIN_QUADRATURE_POINTS} quadrature points, got {points}"
            )));
        }
        let n = if points % 2 == 0 { points + 1 } else { points };
        let tau = protocol.tau;
        let step = tau / (n - 1) as f64;
        let weights = (0..n)
            .map(|k| {
                let w = if k == 0 || k == n - 1 {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * step / 3.0
            })
            .collect();

        let mut q = Self { tau, weights, energy: vec![], variance: vec![], drive: vec![], norm: vec![] };
        for k in 0..n {
            let t = k as f64 * step;
            let state = rho.evolve_unitary(&protocol.interaction_unitary(t));
            let rate = protocol.schedule.phi_dot(t, tau);
            let drive = protocol.lambda_op.scale_real(rate);
            let total = h_self + &drive;
            let mean = state.expectation(&total);
            let second = state.expectation(&(&total * &total));
            q.energy.push(mean);
            q.variance.push((second - mean * mean).max(0.0));
            q.drive.push(state.expectation(&drive));
            q.norm.push(total.trace_product_re(&total).max(0.0).sqrt());
        }
        Ok(q)
    }

    /// (1/tau) * integral of `f` sampled on the grid.
    fn average(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.weights.iter().enumerate().map(|(k, w)| w * f(k)).sum::<f64>() / self.tau
    }

    fn omega_cap(&self) -> f64 {
        self.norm.iter().cloned().fold(0.0, f64::max)
    }

    fn delta_e(&self) -> f64 {
        self.average(|k| self.variance[k].sqrt())
    }
}

/// Delta E_tau = (1/tau) * integral of the energy standard deviation of
/// H + Gamma(t) along the driven trajectory (Simpson rule).
pub fn time_avg_variance(rho: &DensityMatrix, protocol: &ExtractionProtocol, quadrature_points: usize) -> Result<f64> {
    Ok(Quadrature::new(rho, protocol, protocol.h_self.matrix(), quadrature_points)?.delta_e())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QslReport {
    pub qsl_time: f64,
    pub tau: f64,
    /// tau - qsl_time
    pub margin: f64,
    pub bures: f64,
    pub delta_e_tau: f64,
}

/// Mandelstam-Tamm type check tau >= L(rho, P_rho) / Delta E_tau.
pub fn qsl_check(rho: &DensityMatrix, protocol: &ExtractionProtocol) -> Result<QslReport> {
    let (passive, _) = passive_state(rho, &protocol.h_self)?;
    let bures = bures_angle(rho.matrix(), passive.matrix())?;
    let delta_e = time_avg_variance(rho, protocol, DEFAULT_QUADRATURE_POINTS)?;
    let qsl_time = if bures <= BURES_ZERO {
        0.0
    } else if delta_e <= 1e-12 {
        return Err(Error::ZeroVariance(bures));
    } else {
        bures / delta_e
    };
    Ok(QslReport { qsl_time, tau: protocol.tau, margin: protocol.tau - qsl_time, bures, delta_e_tau: delta_e })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChainReport {
    /// Added to the self-Hamiltonian to make its spectrum non-negative.
    pub shift: f64,
    pub omega_cap: f64,
    pub trace_h: f64,
    pub delta_e_tau: f64,
    /// (1/tau) int sqrt(Omega^2 - <H(t)>^2)
    pub bandwidth_bound: f64,
    /// sqrt((1/tau) int (Omega - <H(t)>)) * sqrt((1/tau) int (Omega + <H(t)>))
    pub cauchy_schwarz_bound: f64,
    /// sqrt((Omega + <Lambda>_0 + tr H)(Omega - <Lambda>_0))
    pub final_bound: f64,
    /// (1/tau) int <Gamma(t)>
    pub avg_drive: f64,
    /// tr{rho Lambda}
    pub lambda_expect0: f64,
    /// |avg_drive - lambda_expect0|
    pub drive_residual: f64,
    pub holds: bool,
}

const CHAIN_TOL: f64 = 1e-8;
const DRIVE_TOL: f64 = 1e-7;

/// Evaluates each link of
/// Delta E_tau <= (1/tau) int sqrt(Omega^2 - <H>^2)
///             <= sqrt(avg(Omega - <H>)) sqrt(avg(Omega + <H>))
///             <= sqrt((Omega + <Lambda>_0 + tr H)(Omega - <Lambda>_0)),
/// plus the time-average identity avg <Gamma> = <Lambda>_0. The last link
/// needs a non-negative self-Hamiltonian; a negative spectrum is shifted up
/// when `allow_shift`, otherwise rejected.
pub fn appendix_chain(rho: &DensityMatrix, protocol: &ExtractionProtocol, allow_shift: bool) -> Result<ChainReport> {
    appendix_chain_with(rho, protocol, allow_shift, DEFAULT_QUADRATURE_POINTS)
}

pub fn appendix_chain_with(
    rho: &DensityMatrix,
    protocol: &ExtractionProtocol,
    allow_shift: bool,
    points: usize,
) -> Result<ChainReport> {
    let e_min = protocol.h_self.energies()[0];
    let shift = if e_min < 0.0 {
        if !allow_shift {
            return Err(Error::NegativeSpectrum(e_min));
        }
        -e_min
    } else {
        0.0
    };
    let h = protocol.h_self.shifted(shift);
    let q = Quadrature::new(rho, protocol, h.matrix(), points)?;
    let omega = q.omega_cap();
    let trace_h = h.trace();
    let delta_e = q.delta_e();

    let bandwidth_bound = q.average(|k| (omega * omega - q.energy[k] * q.energy[k]).max(0.0).sqrt());
    let below = q.average(|k| omega - q.energy[k]);
    let above = q.average(|k| omega + q.energy[k]);
    let cauchy_schwarz_bound = below.max(0.0).sqrt() * above.max(0.0).sqrt();
    let lambda_expect0 = rho.expectation(&protocol.lambda_op);
    let final_bound = ((omega + lambda_expect0 + trace_h) * (omega - lambda_expect0)).max(0.0).sqrt();
    let avg_drive = q.average(|k| q.drive[k]);
    let drive_residual = (avg_drive - lambda_expect0).abs();

    let holds = delta_e <= bandwidth_bound + CHAIN_TOL
        && bandwidth_bound <= cauchy_schwarz_bound + CHAIN_TOL
        && cauchy_schwarz_bound <= final_bound + CHAIN_TOL
        && drive_residual <= DRIVE_TOL;
    Ok(ChainReport {
        shift,
        omega_cap: omega,
        trace_h,
        delta_e_tau: delta_e,
        bandwidth_bound,
        cauchy_schwarz_bound,
        final_bound,
        avg_drive,
        lambda_expect0,
        drive_residual,
        holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptions {
    /// Replaces the computed Omega when larger.
    pub omega: Option<f64>,
    pub allow_shift: bool,
    pub quadrature_points: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self { omega: None, allow_shift: true, quadrature_points: DEFAULT_QUADRATURE_POINTS }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerBoundReport {
    pub tau: f64,
    pub omega_cap: f64,
    pub lambda_expect0: f64,
    pub trace_h: f64,
    /// min(Omega, final chain bound)
    pub g_value: f64,
    pub bures: f64,
    pub delta_e_tau: f64,
    pub qsl_time: f64,
    pub ergotropy: f64,
    pub mutual_information: f64,
    pub beta: f64,
    /// ergotropy / tau
    pub avg_power: f64,
    /// I G / (beta L)
    pub power_bound: f64,
    pub holds: bool,
    /// G recomputed with a protocol of duration 2 tau.
    pub g_value_at_double_tau: f64,
    pub g_relative_variation: f64,
    pub g_tau_invariant: bool,
}

/// Average power E / tau against I G / (beta L) for a locally thermal state
/// with positive local beta.
pub fn power_bound(rho: &DensityMatrix, protocol: &ExtractionProtocol, opts: &PowerOptions) -> Result<PowerBoundReport> {
    let h = &protocol.h_self;
    let (passive, _) = passive_state(rho, h)?;
    let bures = bures_angle(rho.matrix(), passive.matrix())?;
    if bures <= BURES_ZERO {
        return Err(Error::PassiveInput);
    }
    let beta = main_identity(rho, h)?
        .beta
        .ok_or_else(|| Error::InvalidParameter("marginals are not thermal".into()))?;
    if beta.abs() < 1e-12 {
        return Err(Error::BetaZero);
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("power bound needs a finite positive local beta, got {beta}")));
    }

    let g_of = |p: &ExtractionProtocol| -> Result<(f64, ChainReport)> {
        let chain = appendix_chain_with(rho, p, opts.allow_shift, opts.quadrature_points)?;
        let omega = opts.omega.map_or(chain.omega_cap, |o| o.max(chain.omega_cap));
        let fin = ((omega + chain.lambda_expect0 + chain.trace_h) * (omega - chain.lambda_expect0)).max(0.0).sqrt();
        Ok((omega.min(fin), ChainReport { omega_cap: omega, final_bound: fin, ..chain }))
    };
    let (g_value, chain) = g_of(protocol)?;
    let doubled = build_protocol_with(rho, h, 2.0 * protocol.tau, protocol.schedule)?;
    let (g_double, _) = g_of(&doubled)?;
    let g_relative_variation = (g_double - g_value).abs() / g_value.abs().max(1e-300);

    let erg = ergotropy(rho, h)?;
    let mi = mutual_information(rho)?;
    let avg_power = erg / protocol.tau;
    let bound = mi * g_value / (beta * bures);
    let delta_e = chain.delta_e_tau;
    let qsl_time = if delta_e > 1e-12 { bures / delta_e } else { f64::INFINITY };
    Ok(PowerBoundReport {
        tau: protocol.tau,
        omega_cap: chain.omega_cap,
        lambda_expect0: chain.lambda_expect0,
        trace_h: chain.trace_h,
        g_value,
        bures,
        delta_e_tau: delta_e,
        qsl_time,
        ergotropy: erg,
        mutual_information: mi,
        beta,
        avg_power,
        power_bound: bound,
        holds: avg_power <= bound + 1e-9 && protocol.tau >= qsl_time - 1e-9,
        g_value_at_double_tau: g_double,
        g_relative_variation,
        g_tau_invariant: g_relative_variation <= 1e-8,
    })
}
