//! Seeded property suite over the identities and inequalities of
//! [`crate::correlations`] and [`crate::extraction`].

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{
    bound_identity, equal_entropy_identity, general_state_identity, inverse_landauer_check, main_identity,
};
use crate::ergotropy::passive_state;
use crate::error::{Error, Result};
use crate::extraction::{appendix_chain, build_protocol};
use crate::states::{locally_thermal_xstate_sampler, random_density_matrix, Hamiltonian};

/// Reference inverse temperatures cycled through by seed for the checks that
/// take an arbitrary beta.
const REFERENCE_BETAS: [f64; 5] = [-2.0, -0.5, 0.3, 1.0, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    MainIdentity,
    BoundIdentity,
    EqualEntropyIdentity,
    InverseLandauerCheck,
    GeneralStateIdentity,
    AppendixChain,
    AppendixDriveIdentity,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::MainIdentity,
        Check::BoundIdentity,
        Check::EqualEntropyIdentity,
        Check::InverseLandauerCheck,
        Check::GeneralStateIdentity,
        Check::AppendixChain,
        Check::AppendixDriveIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::MainIdentity => "main_identity",
            Check::BoundIdentity => "bound_identity",
            Check::EqualEntropyIdentity => "equal_entropy_identity",
            Check::InverseLandauerCheck => "inverse_landauer_check",
            Check::GeneralStateIdentity => "general_state_identity",
            Check::AppendixChain => "appendix_chain",
            Check::AppendixDriveIdentity => "appendix_drive_identity",
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Check::InverseLandauerCheck => 1e-9,
            Check::AppendixDriveIdentity => 1e-7,
            _ => 1e-8,
        }
    }

    fn index(self) -> usize {
        Check::ALL.iter().position(|&c| c == self).unwrap_or(0)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown check `{s}`")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub name: &'static str,
    pub tolerance: f64,
    pub max_residual: f64,
    pub worst_seed: u64,
    pub failures: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Failure {
    pub check: &'static str,
    pub seed: u64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub first_seed: u64,
    pub seeds: u64,
    pub passed: bool,
    pub checks: Vec<CheckSummary>,
    /// Lowest failing seed, for reproduction.
    pub first_failure: Option<Failure>,
}

/// Residuals of every check for one seed. A check that errors out scores
/// +inf. `fault` adds 1 to the named residual (negative control).
pub fn residuals_for_seed(seed: u64, fault: Option<Check>) -> [f64; 7] {
    let h = Hamiltonian::two_qubit(1.0);
    let reference_beta = REFERENCE_BETAS[(seed % REFERENCE_BETAS.len() as u64) as usize];
    let (thermal_x, _) = locally_thermal_xstate_sampler(seed, 1.0);
    let generic = random_density_matrix(&[2, 2], 4, seed);

    let or_inf = |r: Result<f64>| r.unwrap_or(f64::INFINITY);
    let mut out = [0.0; 7];
    out[Check::MainIdentity.index()] = or_inf(main_identity(&thermal_x, &h).map(|r| r.residual.unwrap_or(0.0)));
    out[Check::BoundIdentity.index()] = match bound_identity(&thermal_x, &h) {
        Err(Error::BetaZero) => 0.0,
        r => or_inf(r),
    };
    out[Check::EqualEntropyIdentity.index()] = or_inf(generic.clone().and_then(|rho| {
        let (p, _) = passive_state(&rho, &h)?;
        equal_entropy_identity(&rho, &p, &h, reference_beta)
    }));
    out[Check::InverseLandauerCheck.index()] = or_inf(
        inverse_landauer_check(&thermal_x, &h).map(|s| (-s.basic).max(-s.tight).max(s.tight - s.basic).max(0.0)),
    );
    out[Check::GeneralStateIdentity.index()] =
        or_inf(generic.and_then(|rho| general_state_identity(&rho, &h, reference_beta)).map(|g| g.residual));
    let chain = build_protocol(&thermal_x, &h, 1.0).and_then(|p| appendix_chain(&thermal_x, &p, true));
    out[Check::AppendixChain.index()] = or_inf(chain.clone().map(|c| {
        (c.delta_e_tau - c.bandwidth_bound)
            .max(c.bandwidth_bound - c.cauchy_schwarz_bound)
            .max(c.cauchy_schwarz_bound - c.final_bound)
            .max(0.0)
    }));
    out[Check::AppendixDriveIdentity.index()] = or_inf(chain.map(|c| c.drive_residual));

    if let Some(f) = fault {
        out[f.index()] += 1.0;
    }
    out
}

/// Runs every check for seeds first_seed..first_seed + seeds on the rayon pool.
pub fn run_verify(first_seed: u64, seeds: u64, fault: Option<Check>) -> Result<VerifyReport> {
    if seeds == 0 {
        return Err(Error::InvalidParameter("need at least one seed".into()));
    }
    let all: Vec<[f64; 7]> =
        (first_seed..first_seed.saturating_add(seeds)).into_par_iter().map(|s| residuals_for_seed(s, fault)).collect();
    let fails = |c: Check, r: f64| !(r <= c.tolerance());

    let checks: Vec<CheckSummary> = Check::ALL
        .iter()
        .map(|&c| {
            let k = c.index();
            let (worst_seed, max_residual) = all
                .iter()
                .enumerate()
                .map(|(s, r)| (first_seed + s as u64, r[k]))
                .fold((0, f64::NEG_INFINITY), |best, x| if x.1 > best.1 { x } else { best });
            let failures = all.iter().filter(|r| fails(c, r[k])).count();
            CheckSummary { name: c.name(), tolerance: c.tolerance(), max_residual, worst_seed, failures, passed: failures == 0 }
        })
        .collect();

    let first_failure = all.iter().enumerate().find_map(|(s, r)| {
        Check::ALL
            .iter()
            .find(|&&c| fails(c, r[c.index()]))
            .map(|&c| Failure { check: c.name(), seed: first_seed + s as u64, residual: r[c.index()] })
    });
    Ok(VerifyReport { first_seed, seeds, passed: first_failure.is_none(), checks, first_failure })
}
