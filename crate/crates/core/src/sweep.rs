//! Steady-state sweeps over the initial-state parameter c and the bath
//! temperature, producing one row of energetic and correlation quantities per
//! grid point.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{local_betas, main_identity};
use crate::dissipation::{steady_state, SteadyStateParams};
use crate::ergotropy::ErgotropyReport;
use crate::error::{Error, Result};
use crate::states::Hamiltonian;

pub const CSV_HEADER: &str = "c,beta_e,ergotropy,bound_ergotropy,total_ergotropy,mutual_info_over_beta,local_beta";

/// Below this |beta| the ratio I/beta is not formed directly.
const SMALL_BETA: f64 = 1e-6;
/// Below this the mutual information counts as zero when deciding whether
/// I/beta is a 0/0 form.
const SMALL_MI: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub beta_e: Vec<f64>,
    pub c_grid: Vec<f64>,
    pub omega: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { beta_e: vec![0.01, 1.0, 10.0], c_grid: c_range(0.0, 1.0, 200), omega: 1.0 }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beta_e.is_empty() || self.c_grid.is_empty() {
            return Err(Error::InvalidParameter("sweep grids must be nonempty".into()));
        }
        if let Some(c) = self.c_grid.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::InvalidParameter(format!("c must lie in [0, 1], got {c}")));
        }
        if let Some(b) = self.beta_e.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(Error::InvalidParameter(format!("beta_e must be positive and finite, got {b}")));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {}", self.omega)));
        }
        Ok(())
    }
}

/// `intervals + 1` evenly spaced points from `start` to `stop`, computed as
/// start + (stop - start) i / intervals so that e.g. 0.75 is hit exactly.
pub fn c_range(start: f64, stop: f64, intervals: usize) -> Vec<f64> {
    if intervals == 0 {
        return vec![start];
    }
    (0..=intervals).map(|i| start + (stop - start) * i as f64 / intervals as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub c: f64,
    pub beta_e: f64,
    pub ergotropy: f64,
    pub bound_ergotropy: f64,
    pub total_ergotropy: f64,
    pub mutual_info_over_beta: f64,
    pub local_beta: f64,
    pub mutual_information: f64,
    /// D(P_rho || rho_A ⊗ rho_B)
    pub relative_entropy: f64,
    /// |beta E - I + D| where beta is usable.
    pub identity_residual: Option<f64>,
}

struct Point {
    ergotropy: f64,
    bound_ergotropy: f64,
    mutual_information: f64,
    relative_entropy: f64,
    local_beta: f64,
    residual: Option<f64>,
}

fn evaluate(c: f64, beta_e: f64, omega: f64) -> Result<Point> {
    let rho = steady_state(&SteadyStateParams { c, beta_e, omega })?;
    let h = Hamiltonian::two_qubit(omega);
    let rep = ErgotropyReport::new(&rho, &h)?;
    let id = main_identity(&rho, &h)?;
    let (local_beta, _) = local_betas(&rho, &h)?;
    Ok(Point {
        ergotropy: rep.ergotropy,
        bound_ergotropy: rep.bound_ergotropy,
        mutual_information: id.mutual_information,
        relative_entropy: id.relative_entropy_passive_to_product,
        local_beta,
        residual: id.residual,
    })
}

fn ratio(p: &Point) -> Option<f64> {
    (p.local_beta.abs() > SMALL_BETA).then(|| p.mutual_information / p.local_beta)
}

/// I/beta, with the small-beta cases handled separately: a genuine 0/0 takes
/// the mean of the ratio at the neighbouring grid points, a non-zero I over a
/// vanishing beta is reported as infinite.
fn mutual_info_over_beta(p: &Point, neighbours: &[f64], beta_e: f64, omega: f64) -> Result<f64> {
    if let Some(r) = ratio(p) {
        return Ok(r);
    }
    if p.mutual_information > SMALL_MI {
        return Ok(f64::INFINITY.copysign(if p.local_beta == 0.0 { 1.0 } else { p.local_beta }));
    }
    let mut vals = Vec::new();
    for &c in neighbours {
        if let Some(r) = ratio(&evaluate(c, beta_e, omega)?) {
            vals.push(r);
        }
    }
    Ok(if vals.is_empty() { 0.0 } else { vals.iter().sum::<f64>() / vals.len() as f64 })
}

/// All (beta_e, c) rows, ordered by beta_e as given and then by c as given.
/// Points are evaluated on the rayon pool.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let jobs: Vec<(f64, usize)> = config.beta_e.iter().flat_map(|&b| (0..config.c_grid.len()).map(move |i| (b, i))).collect();
    jobs.par_iter()
        .map(|&(beta_e, i)| {
            let c = config.c_grid[i];
            let p = evaluate(c, beta_e, config.omega)?;
            let neighbours: Vec<f64> = [i.checked_sub(1), Some(i + 1)]
                .into_iter()
                .flatten()
                .filter_map(|k| config.c_grid.get(k).copied())
                .collect();
            let mi_over_beta = mutual_info_over_beta(&p, &neighbours, beta_e, config.omega)?;
            Ok(SweepRow {
                c,
                beta_e,
                ergotropy: p.ergotropy,
                bound_ergotropy: p.bound_ergotropy,
                total_ergotropy: p.ergotropy + p.bound_ergotropy,
                mutual_info_over_beta: mi_over_beta,
                local_beta: p.local_beta,
                mutual_information: p.mutual_information,
                relative_entropy: p.relative_entropy,
                identity_residual: p.residual,
            })
        })
        .collect()
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let cells = [r.c, r.beta_e, r.ergotropy, r.bound_ergotropy, r.total_ergotropy, r.mutual_info_over_beta, r.local_beta];
        for (k, v) in cells.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write_number(&mut out, *v);
        }
        out.push('\n');
    }
    out
}

/// Shortest round-trip representation; exponent form for very small or
/// very large magnitudes.
pub fn write_number(out: &mut String, v: f64) -> std::fmt::Result {
    let a = v.abs();
    if v != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        write!(out, "{v:e}")
    } else {
        write!(out, "{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_hits_landmarks_exactly() {
        let cfg = SweepConfig::default();
        assert_eq!(cfg.c_grid.len(), 201);
        assert!(cfg.c_grid.contains(&0.75));
        assert_eq!(cfg.c_grid[0], 0.0);
        assert_eq!(cfg.c_grid[200], 1.0);
    }

    #[test]
    fn rows_are_ordered_and_csv_has_fixed_header() {
        let cfg = SweepConfig { beta_e: vec![1.0, 0.5], c_grid: c_range(0.0, 1.0, 4), omega: 1.0 };
        let rows = run_sweep(&cfg).unwrap();
        let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.beta_e, r.c)).collect();
        assert_eq!(keys[0], (1.0, 0.0));
        assert_eq!(keys[4], (1.0, 1.0));
        assert_eq!(keys[5], (0.5, 0.0));
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(csv.lines().count(), 11);
    }

    #[test]
    fn dark_state_ratio_is_infinite() {
        let cfg = SweepConfig { beta_e: vec![1.0], c_grid: vec![0.0, 0.5], omega: 1.0 };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows[0].mutual_info_over_beta, f64::INFINITY);
        assert!(to_csv(&rows).lines().nth(1).unwrap().contains(",inf,"));
        assert!(rows[1].mutual_info_over_beta.is_finite());
    }

    #[test]
    fn invalid_config() {
        let bad = SweepConfig { c_grid: vec![1.5], ..SweepConfig::default() };
        assert!(run_sweep(&bad).is_err());
        let bad = SweepConfig { beta_e: vec![], ..SweepConfig::default() };
        assert!(run_sweep(&bad).is_err());
    }
}
