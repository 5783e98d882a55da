//! Analytic results against the Monte Carlo oracle.

use std::fmt;

use safebarrier::oracle::{estimate_pfd, estimate_pfh, Estimate};
use safebarrier::{ExactModelF64, SimulatedBarrier};
use serde::{Deserialize, Serialize};

use crate::config::JobConfig;
use crate::error::CliError;
use crate::evaluate::sci;

/// Checks are resolved at this many standard errors.
pub const SIGMA_BAND: f64 = 3.0;

/// A check whose expected number of failure events (samples times
/// probability) is below this is reported as skipped: a near-empty tally
/// has no usable standard error.
pub const MIN_EXPECTED_EVENTS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub quantity: String,
    pub t_hours: Option<f64>,
    pub analytic: f64,
    pub simulated: f64,
    pub std_error: f64,
    pub samples: u64,
    /// `|simulated - analytic| / std_error`.
    pub z: Option<f64>,
    pub status: Status,
}

impl Check {
    fn new(quantity: &str, t_hours: Option<f64>, analytic: f64, estimate: &Estimate) -> Self {
        let z = estimate.z_score(analytic);
        let status = if (estimate.trials as f64) * analytic < MIN_EXPECTED_EVENTS {
            Status::Skipped
        } else if z <= SIGMA_BAND {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            quantity: quantity.into(),
            t_hours,
            analytic,
            simulated: estimate.mean,
            std_error: estimate.std_error,
            samples: estimate.trials,
            z: z.is_finite().then_some(z),
            status,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub architecture: String,
    pub trials: u64,
    pub seed: u64,
    pub grid_points: usize,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl ValidateReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// `scale_expected` multiplies every analytic expectation; 1 in normal use.
pub fn validate(job: &JobConfig, scale_expected: f64) -> Result<ValidateReport, CliError> {
    let block = job
        .simulation
        .as_ref()
        .ok_or_else(|| CliError::config("config has no `simulation` block"))?;
    let config = block.config()?;
    let spec = job.spec()?;
    let model = ExactModelF64::new(spec);
    let barrier = SimulatedBarrier::from(spec);

    let pfd = estimate_pfd(&barrier, &config)?;
    let pfh = estimate_pfh(&barrier, &config)?;

    let mut checks = vec![Check::new(
        "pfd_average",
        None,
        model.pfd_average().value() * scale_expected,
        &pfd.average,
    )];
    for (&t, estimate) in pfd.times.iter().zip(&pfd.curve) {
        checks.push(Check::new("pfd", Some(t), model.pfd_instant(t)? * scale_expected, estimate));
    }
    checks.push(Check::new(
        "pfh_average",
        None,
        model.pfh_average()?.value() * scale_expected,
        &pfh,
    ));

    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    Ok(ValidateReport {
        architecture: spec.architecture().to_string(),
        trials: config.trials,
        seed: config.seed,
        grid_points: config.grid_points,
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skipped),
        checks,
    })
}

impl fmt::Display for ValidateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} barrier, {} trials, seed {}, {} grid points",
            self.architecture, self.trials, self.seed, self.grid_points
        )?;
        writeln!(
            f,
            "{:<12}{:>10}{:>14}{:>14}{:>14}{:>8}  status",
            "quantity", "t_hours", "analytic", "simulated", "std_error", "z"
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<12}{:>10}{:>14}{:>14}{:>14}{:>8}  {}",
                c.quantity,
                c.t_hours.map_or_else(|| "-".into(), |t| t.to_string()),
                sci(c.analytic),
                sci(c.simulated),
                sci(c.std_error),
                c.z.map_or_else(|| "inf".into(), |z| format!("{z:.2}")),
                match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Skipped => "skipped (too few expected events)",
                }
            )?;
        }
        writeln!(
            f,
            "{} passed, {} failed, {} skipped (band {SIGMA_BAND} standard errors)",
            self.passed, self.failed, self.skipped
        )
    }
}
