//! Single-barrier evaluation report.

use std::fmt;

use safebarrier::approx::{self, pfd_average_approx, pfd_instant_approx, pfh_average_approx, pfh_from_pfd_approx};
use safebarrier::sil::{classify_demand_mode, sil_from_pfd, sil_from_pfh};
use safebarrier::{BarrierSpecF64, ExactModelF64, Warning};
use serde::{Deserialize, Serialize};

use crate::config::JobConfig;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierSummary {
    pub architecture: String,
    pub lambda_per_hour: f64,
    pub t1_hours: f64,
    pub partial_tests: u32,
    pub coverage: f64,
    pub partial_test_period_hours: f64,
    pub lambda_t1: f64,
}

impl BarrierSummary {
    pub fn of(spec: &BarrierSpecF64) -> Self {
        let policy = spec.test_policy();
        Self {
            architecture: spec.architecture().to_string(),
            lambda_per_hour: spec.failure_rate(),
            t1_hours: spec.full_test_period(),
            partial_tests: policy.partial_test_count(),
            coverage: policy.partial_coverage(),
            partial_test_period_hours: policy.partial_test_period(),
            lambda_t1: spec.lambda_t1(),
        }
    }
}

/// Exact and approximate value side by side; `relative_difference` is
/// `(approximate - exact) / exact`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub exact: f64,
    pub approximate: Option<f64>,
    pub relative_difference: Option<f64>,
}

impl Comparison {
    fn new(exact: f64, approximate: Option<f64>) -> Self {
        let relative_difference = approximate.filter(|_| exact > 0.0).map(|a| (a - exact) / exact);
        Self {
            exact,
            approximate,
            relative_difference,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfhFromPfd {
    pub from_end_of_interval: f64,
    pub from_average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    pub lambda_t1: f64,
    pub threshold: f64,
    pub within_domain: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub basis: String,
    pub probability: f64,
    pub level: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilSummary {
    pub low_demand: Verdict,
    pub high_demand: Verdict,
    pub demand_rate_per_year: Option<f64>,
    pub demand_mode: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateReport {
    pub barrier: BarrierSummary,
    pub pfd_average: Comparison,
    /// PFD just before the full test.
    pub pfd_end_of_interval: Comparison,
    pub pfh_average: Comparison,
    pub pfh_from_pfd: Option<PfhFromPfd>,
    pub validity: Validity,
    pub sil: SilSummary,
    pub warnings: Vec<String>,
}

fn push_warnings(out: &mut Vec<String>, label: &str, warnings: &[Warning]) {
    for w in warnings {
        let line = format!("{label}: {w}");
        if !out.contains(&line) {
            out.push(line);
        }
    }
}

pub fn evaluate(job: &JobConfig) -> Result<EvaluateReport, CliError> {
    let spec = job.spec()?;
    let model = ExactModelF64::new(spec);
    let t1 = spec.full_test_period();
    let basic = !spec.test_policy().has_effective_partial_tests();
    let mut warnings = Vec::new();

    let avg = model.pfd_average();
    let avg_approx = pfd_average_approx(&spec);
    push_warnings(&mut warnings, "pfd_average", avg.warnings());
    push_warnings(&mut warnings, "pfd_average approximation", avg_approx.value.warnings());

    let end = model.pfd_instant(t1)?;
    let end_approx = pfd_instant_approx(&spec, t1)?;
    push_warnings(&mut warnings, "pfd(T1) approximation", end_approx.value.warnings());

    let pfh = model.pfh_average()?;
    push_warnings(&mut warnings, "pfh_average", pfh.warnings());
    let (pfh_approx, from_pfd) = if basic {
        let a = pfh_average_approx(&spec)?;
        push_warnings(&mut warnings, "pfh_average approximation", a.value.warnings());
        let forms = pfh_from_pfd_approx(&spec)?;
        (
            Some(a.get()),
            Some(PfhFromPfd {
                from_end_of_interval: forms.from_end_of_interval.get(),
                from_average: forms.from_average.get(),
            }),
        )
    } else {
        (None, None)
    };

    let validity = approx::validity(&spec);
    let low = sil_from_pfd(avg.value())?;
    let high = sil_from_pfh(pfh.value())?;
    let demand_mode = job
        .demand_rate_per_year
        .map(|rate| classify_demand_mode(rate, t1).map(|m| m.to_string()))
        .transpose()?;

    Ok(EvaluateReport {
        barrier: BarrierSummary::of(&spec),
        pfd_average: Comparison::new(avg.value(), Some(avg_approx.get())),
        pfd_end_of_interval: Comparison::new(end, Some(end_approx.get())),
        pfh_average: Comparison::new(pfh.value(), pfh_approx),
        pfh_from_pfd: from_pfd,
        validity: Validity {
            lambda_t1: validity.lambda_t1,
            threshold: validity.threshold,
            within_domain: validity.within_domain,
        },
        sil: SilSummary {
            low_demand: Verdict {
                basis: "pfd_average".into(),
                probability: low.probability,
                level: low.level.to_string(),
            },
            high_demand: Verdict {
                basis: "pfh_average".into(),
                probability: high.probability,
                level: high.level.to_string(),
            },
            demand_rate_per_year: job.demand_rate_per_year,
            demand_mode,
        },
        warnings,
    })
}

pub(crate) fn sci(x: f64) -> String {
    format!("{x:.5e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), sci)
}

fn pct(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |r| format!("{:+.2}%", 100.0 * r))
}

impl fmt::Display for EvaluateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = &self.barrier;
        writeln!(
            f,
            "barrier {}  lambda = {} /h  T1 = {} h  n = {}  E = {}",
            b.architecture, b.lambda_per_hour, b.t1_hours, b.partial_tests, b.coverage
        )?;
        writeln!(
            f,
            "lambda*T1 = {} ({} the approximation domain lambda*T1 < {})",
            sci(self.validity.lambda_t1),
            if self.validity.within_domain { "inside" } else { "OUTSIDE" },
            self.validity.threshold
        )?;
        writeln!(f)?;
        writeln!(f, "{:<22}{:>14}{:>14}{:>11}", "quantity", "exact", "approximate", "rel.diff")?;
        for (name, c) in [
            ("PFD average", &self.pfd_average),
            ("PFD(T1-)", &self.pfd_end_of_interval),
            ("PFH average", &self.pfh_average),
        ] {
            writeln!(
                f,
                "{:<22}{:>14}{:>14}{:>11}",
                name,
                sci(c.exact),
                opt(c.approximate),
                pct(c.relative_difference)
            )?;
        }
        if let Some(p) = &self.pfh_from_pfd {
            writeln!(f, "{:<22}{:>14}{:>14}", "PFH from PFD(T1)", "-", sci(p.from_end_of_interval))?;
            writeln!(f, "{:<22}{:>14}{:>14}", "PFH from PFD average", "-", sci(p.from_average))?;
        }
        writeln!(f)?;
        let s = &self.sil;
        writeln!(f, "low demand  (PFD average): {}", s.low_demand.level)?;
        writeln!(f, "high demand (PFH average): {}", s.high_demand.level)?;
        if let (Some(rate), Some(mode)) = (s.demand_rate_per_year, &s.demand_mode) {
            writeln!(f, "demand mode at {rate} demands/year: {mode}")?;
        }
        if self.warnings.is_empty() {
            writeln!(f, "warnings: none")
        } else {
            writeln!(f, "warnings:")?;
            self.warnings.iter().try_for_each(|w| writeln!(f, "  - {w}"))
        }
    }
}
