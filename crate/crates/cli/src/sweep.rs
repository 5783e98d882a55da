//! One-parameter sweeps with an optional SIL target.

use std::fmt;

use safebarrier::approx::pfd_average_approx;
use safebarrier::sil::{classify_demand_mode, sil_from_pfd, sil_from_pfh};
use safebarrier::{DemandMode, ExactModelF64, SilLevel};
use serde::{Deserialize, Serialize};

use crate::config::{JobConfig, SweepParameter};
use crate::error::CliError;
use crate::evaluate::sci;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub t1_hours: f64,
    pub lambda_per_hour: f64,
    pub coverage: f64,
    pub partial_tests: u32,
    pub pfd_exact: f64,
    pub pfd_approx: f64,
    pub pfh_exact: f64,
    pub sil_pfd: String,
    pub sil_pfh: String,
    pub within_approximation_domain: bool,
    pub meets_target: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameter: SweepParameter,
    /// Unit of `value` for a `t1` sweep.
    pub unit: Option<String>,
    pub target_sil: Option<String>,
    /// `pfd_average` (low demand) or `pfh_average` (high demand).
    pub basis: String,
    pub rows: Vec<SweepRow>,
    /// Largest feasible `t1` or `lambda`, smallest feasible `coverage` or
    /// `partial_tests`.
    pub best_feasible: Option<f64>,
    pub summary: String,
}

pub fn sweep(job: &JobConfig) -> Result<SweepReport, CliError> {
    let block = job
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("config has no `sweep` block"))?;
    let points = block.points()?;
    let target = block.target()?;
    let mode = match job.demand_rate_per_year {
        Some(rate) => classify_demand_mode(rate, job.t1_hours())?,
        None => DemandMode::LowDemand,
    };

    let mut rows = Vec::with_capacity(points.len());
    for &value in &points {
        let variant = job.with_parameter(block.parameter, value)?;
        let spec = variant.spec()?;
        let model = ExactModelF64::new(spec);
        let pfd = model.pfd_average().value();
        let pfh = model.pfh_average()?.value();
        let approx = pfd_average_approx(&spec);
        let sil_pfd = sil_from_pfd(pfd)?.level;
        let sil_pfh = sil_from_pfh(pfh)?.level;
        let basis_level = match mode {
            DemandMode::LowDemand => sil_pfd,
            DemandMode::HighDemand => sil_pfh,
        };
        rows.push(SweepRow {
            value,
            t1_hours: spec.full_test_period(),
            lambda_per_hour: spec.failure_rate(),
            coverage: spec.test_policy().partial_coverage(),
            partial_tests: spec.test_policy().partial_test_count(),
            pfd_exact: pfd,
            pfd_approx: approx.get(),
            pfh_exact: pfh,
            sil_pfd: sil_pfd.to_string(),
            sil_pfh: sil_pfh.to_string(),
            within_approximation_domain: approx.validity.within_domain,
            meets_target: target.map(|t| basis_level.meets(t)),
        });
    }

    let feasible = rows.iter().filter(|r| r.meets_target == Some(true)).map(|r| r.value);
    let prefer_largest = matches!(block.parameter, SweepParameter::T1 | SweepParameter::Lambda);
    let best_feasible = if prefer_largest {
        feasible.fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
    } else {
        feasible.fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
    };
    let name = parameter_name(block.parameter);
    let summary = match (target, best_feasible) {
        (None, _) => format!("{} values swept; no target SIL", rows.len()),
        (Some(t), None) => format!("no feasible value: no swept {name} reaches {t}"),
        (Some(t), Some(v)) => format!(
            "{} {name} still meeting {t}: {v}",
            if prefer_largest { "largest" } else { "smallest" }
        ),
    };

    Ok(SweepReport {
        parameter: block.parameter,
        unit: (block.parameter == SweepParameter::T1).then(|| {
            serde_json::to_value(job.t1_unit)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default()
        }),
        target_sil: target.map(|t: SilLevel| t.to_string()),
        basis: match mode {
            DemandMode::LowDemand => "pfd_average",
            DemandMode::HighDemand => "pfh_average",
        }
        .into(),
        rows,
        best_feasible,
        summary,
    })
}

fn parameter_name(p: SweepParameter) -> &'static str {
    match p {
        SweepParameter::T1 => "t1",
        SweepParameter::Lambda => "lambda",
        SweepParameter::Coverage => "coverage",
        SweepParameter::PartialTests => "partial_tests",
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = self.unit.as_deref().map(|u| format!(" [{u}]")).unwrap_or_default();
        writeln!(
            f,
            "{:<16}{:>14}{:>14}{:>14}{:>12}{:>12}{:>8}",
            format!("{}{unit}", parameter_name(self.parameter)),
            "pfd_exact",
            "pfd_approx",
            "pfh_exact",
            "sil_pfd",
            "sil_pfh",
            "target"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<16}{:>14}{:>14}{:>14}{:>12}{:>12}{:>8}",
                r.value,
                sci(r.pfd_exact),
                sci(r.pfd_approx),
                sci(r.pfh_exact),
                r.sil_pfd,
                r.sil_pfh,
                match r.meets_target {
                    Some(true) => "pass",
                    Some(false) => "fail",
                    None => "-",
                }
            )?;
        }
        writeln!(f, "basis: {}", self.basis)?;
        writeln!(f, "{}", self.summary)
    }
}
