//! JSON job configuration.

use std::path::Path;

use safebarrier::{Architecture, BarrierSpecF64, SilLevel, SimulationConfig, TestPolicyF64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Hours,
    Days,
}

impl TimeUnit {
    pub fn to_hours(self, value: f64) -> f64 {
        match self {
            TimeUnit::Hours => value,
            TimeUnit::Days => value * 24.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub m: u32,
    pub n_elements: u32,
    pub lambda_per_hour: f64,
    pub t1: f64,
    pub t1_unit: TimeUnit,
    #[serde(default = "one")]
    pub partial_tests: u32,
    #[serde(default)]
    pub coverage: f64,
    #[serde(default)]
    pub demand_rate_per_year: Option<f64>,
    #[serde(default)]
    pub simulation: Option<SimulationBlock>,
    #[serde(default)]
    pub sweep: Option<SweepBlock>,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationBlock {
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_grid")]
    pub grid_points: usize,
}

fn default_grid() -> usize {
    20
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// In the config's `t1_unit`.
    T1,
    Lambda,
    Coverage,
    PartialTests,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub parameter: SweepParameter,
    /// Explicit values; alternatively `range` with `steps`.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub range: Option<[f64; 2]>,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub scale: Scale,
    /// SIL level 1..=4 that every feasible row must reach.
    #[serde(default)]
    pub target_sil: Option<u8>,
}

impl SweepBlock {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let points = match (&self.values, self.range, self.steps) {
            (Some(v), None, None) => v.clone(),
            (None, Some([a, b]), Some(steps)) => spaced(a, b, steps, self.scale)?,
            (None, Some(_), None) => return Err(CliError::config("sweep range needs `steps`")),
            (Some(_), _, _) => return Err(CliError::config("sweep takes either `values` or `range`, not both")),
            (None, None, _) => return Err(CliError::config("sweep needs `values` or `range`")),
        };
        if points.is_empty() {
            return Err(CliError::config("sweep range is empty"));
        }
        if let Some(bad) = points.iter().find(|v| !v.is_finite()) {
            return Err(CliError::config(format!("sweep value {bad} is not finite")));
        }
        Ok(points)
    }

    pub fn target(&self) -> Result<Option<SilLevel>, CliError> {
        self.target_sil
            .map(|n| SilLevel::from_number(n).ok_or_else(|| CliError::config(format!("target_sil must be 1..=4, got {n}"))))
            .transpose()
    }
}

fn spaced(a: f64, b: f64, steps: usize, scale: Scale) -> Result<Vec<f64>, CliError> {
    if steps == 0 {
        return Err(CliError::config("sweep range is empty (steps = 0)"));
    }
    if steps == 1 {
        return Ok(vec![a]);
    }
    let last = (steps - 1) as f64;
    match scale {
        Scale::Linear => Ok((0..steps).map(|i| a + (b - a) * i as f64 / last).collect()),
        Scale::Log => {
            if !(a > 0.0 && b > 0.0) {
                return Err(CliError::config("log-scale sweep needs a positive range"));
            }
            let (la, lb) = (a.ln(), b.ln());
            Ok((0..steps).map(|i| (la + (lb - la) * i as f64 / last).exp()).collect())
        }
    }
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: JobConfig = serde_json::from_str(text).map_err(|e| CliError::config(format!("malformed config: {e}")))?;
        config.spec()?;
        if let Some(rate) = config.demand_rate_per_year {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(CliError::config(format!("demand_rate_per_year must be positive, got {rate}")));
            }
        }
        if let Some(sim) = &config.simulation {
            sim.config()?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn t1_hours(&self) -> f64 {
        self.t1_unit.to_hours(self.t1)
    }

    pub fn spec(&self) -> Result<BarrierSpecF64, CliError> {
        let architecture = Architecture::new(self.m, self.n_elements)?;
        let policy = TestPolicyF64::new(self.t1_hours(), self.partial_tests, self.coverage)?;
        Ok(BarrierSpecF64::new(architecture, self.lambda_per_hour, policy)?)
    }

    /// The job with one sweep parameter replaced.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64) -> Result<Self, CliError> {
        let mut job = self.clone();
        match parameter {
            SweepParameter::T1 => job.t1 = value,
            SweepParameter::Lambda => job.lambda_per_hour = value,
            SweepParameter::Coverage => job.coverage = value,
            SweepParameter::PartialTests => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= f64::from(u32::MAX)) {
                    return Err(CliError::config(format!("partial_tests must be a positive integer, got {value}")));
                }
                job.partial_tests = value as u32;
            }
        }
        job.spec()?;
        Ok(job)
    }
}

impl SimulationBlock {
    pub fn config(&self) -> Result<SimulationConfig, CliError> {
        Ok(SimulationConfig::new(self.trials, self.seed, self.grid_points)?)
    }
}
