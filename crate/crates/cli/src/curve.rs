//! PFD(t) traces as CSV.
//!
//! Columns: `trace,t_hours,pfd_exact,pfd_approx`. Traces are `basic`, its
//! horizontal `basic_average` (two rows, at 0 and T1), and, when partial
//! tests are effective, `partial` and `partial_average`. Times use the
//! shortest round-trip representation; probabilities six significant
//! digits in scientific notation.

use std::io::Write;

use safebarrier::approx::{pfd_at_approx, pfd_average_approx};
use safebarrier::exact::curve_instants;
use safebarrier::{BarrierSpecF64, ExactModelF64};

use crate::config::JobConfig;
use crate::error::CliError;
use crate::evaluate::sci;

pub const HEADER: [&str; 4] = ["trace", "t_hours", "pfd_exact", "pfd_approx"];

fn trace<W: Write>(out: &mut csv::Writer<W>, name: &str, spec: &BarrierSpecF64, samples: usize) -> Result<(), CliError> {
    let model = ExactModelF64::new(*spec);
    for (t, limit) in curve_instants(spec, samples)? {
        let exact = model.pfd_at(t, limit)?;
        let approx = pfd_at_approx(spec, t, limit)?.get();
        out.write_record([name, &t.to_string(), &sci(exact), &sci(approx)])?;
    }
    let avg = sci(model.pfd_average().value());
    let avg_approx = sci(pfd_average_approx(spec).get());
    let average = format!("{name}_average");
    for t in [0.0, spec.full_test_period()] {
        out.write_record([average.as_str(), &t.to_string(), &avg, &avg_approx])?;
    }
    Ok(())
}

pub fn write_curve<W: Write>(job: &JobConfig, samples: usize, sink: W) -> Result<(), CliError> {
    let spec = job.spec()?;
    if samples < 2 {
        return Err(CliError::config(format!("--samples must be at least 2, got {samples}")));
    }
    let mut out = csv::Writer::from_writer(sink);
    out.write_record(HEADER)?;
    trace(&mut out, "basic", &spec.without_partial_tests(), samples)?;
    if spec.test_policy().has_effective_partial_tests() {
        trace(&mut out, "partial", &spec, samples)?;
    }
    out.flush()?;
    Ok(())
}
