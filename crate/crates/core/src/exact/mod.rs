//! Exact evaluators: reliability, instantaneous and average PFD, and the
//! one-hour conditional unreliability (PFH), with and without partial
//! proof tests.
//!
//! Partial tests happen at `p T0` for `p = 1..n-1`; the event at `T1` is the
//! full test, after which the barrier is as new. Values are right-continuous
//! at partial-test instants and `t = T1` reports the value just before the
//! full test. For the PFH lookahead window `[t, t + 1 h]` running past `T1`
//! the last interval is extended without renewal.

mod kernel;

pub use kernel::UnavailabilityKernel;

use crate::coefficients::binomial_unchecked;
use crate::error::{Error, Result};
use crate::model::{BarrierSpec, Evaluation, Limit, Warning};
use crate::quadrature::{integrate_piecewise, knots, SimpsonConfig};
use crate::scalar::{CompensatedSum, Scalar};

/// One sample of a PFD(t) trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint<S> {
    pub t_hours: S,
    pub value: S,
}

/// Exact evaluators bound to one barrier. Construction precomputes the
/// series coefficients of the architecture; reuse the model for repeated
/// queries.
#[derive(Debug, Clone)]
pub struct ExactModel<S> {
    spec: BarrierSpec<S>,
    kernel: UnavailabilityKernel<S>,
}

impl<S: Scalar> ExactModel<S> {
    pub fn new(spec: BarrierSpec<S>) -> Self {
        Self {
            kernel: UnavailabilityKernel::new(spec.architecture()),
            spec,
        }
    }

    pub fn spec(&self) -> &BarrierSpec<S> {
        &self.spec
    }

    pub fn kernel(&self) -> &UnavailabilityKernel<S> {
        &self.kernel
    }

    /// `R(t) = Σ_{k=M}^{N} C(N,k) e^{-kλt} (1 - e^{-λt})^{N-k}`.
    pub fn reliability(&self, t: S) -> Result<S> {
        self.spec.check_time(t)?;
        if self.spec.test_policy().has_effective_partial_tests() {
            return Err(Error::PartialTestsUnsupported);
        }
        let arch = self.spec.architecture();
        let a = self.spec.failure_rate() * t;
        let up = (-a).exp();
        let down = -(-a).exp_m1();
        let r: CompensatedSum<S> = (arch.m_required()..=arch.n_elements())
            .map(|k| {
                S::count(binomial_unchecked(arch.n_elements(), k))
                    * up.powi(k as i32)
                    * down.powi((arch.n_elements() - k) as i32)
            })
            .collect();
        Ok(r.value().min(S::one()))
    }

    /// Instantaneous PFD at `t ∈ [0, T1]`.
    pub fn pfd_instant(&self, t: S) -> Result<S> {
        self.pfd_at(t, Limit::Right)
    }

    /// PFD at `t` approached from the given side. `Limit::Left` at a partial
    /// test instant gives the pre-test value.
    pub fn pfd_at(&self, t: S, limit: Limit) -> Result<S> {
        self.spec.check_time(t)?;
        Ok(self.unavailability_at(t, limit))
    }

    #[inline]
    fn unavailability_at(&self, t: S, limit: Limit) -> S {
        let a = self.spec.element_exposure(t, limit);
        self.kernel.unavailability(a).max(S::zero()).min(S::one())
    }

    /// Average PFD over `[0, T1]`.
    pub fn pfd_average(&self) -> Evaluation<S> {
        let policy = self.spec.test_policy();
        let (n, coverage) = if policy.has_effective_partial_tests() {
            (policy.partial_test_count(), policy.partial_coverage())
        } else {
            (1, S::zero())
        };
        let period_exposure = self.spec.failure_rate() * self.spec.full_test_period() / S::count(n.into());
        let residue_step = (S::one() - coverage) * period_exposure;
        let largest = residue_step * S::count(u64::from(n - 1)) + period_exposure;

        let value = if largest <= S::lit(2.0) / S::count(self.spec.architecture().n_elements().into()) {
            // Small exposures: per-interval means from the series.
            let total: CompensatedSum<S> = (0..n)
                .map(|p| {
                    self.kernel
                        .segment_mean(residue_step * S::count(p.into()), period_exposure)
                })
                .collect();
            total.value() / S::count(n.into())
        } else {
            self.kernel.closed_form_mean(n, coverage, period_exposure)
        };
        Evaluation::exact(value)
    }

    /// Average PFD from the closed form with the `S` and `T` sums, without
    /// the small-exposure series. Absolute accuracy is a few ulps times
    /// `Σ|S(M,N,x)|`; relative accuracy degrades for very small results.
    pub fn pfd_average_closed_form(&self) -> S {
        let policy = self.spec.test_policy();
        let n = policy.partial_test_count();
        let period_exposure = self.spec.failure_rate() * policy.partial_test_period();
        self.kernel
            .closed_form_mean(n, policy.partial_coverage(), period_exposure)
    }

    /// Raw one-hour conditional unreliability `1 - (1 - PFD(t+1h)) / (1 - PFD(t))`
    /// without clamping; may be negative when a partial test falls inside
    /// the window.
    fn pfh_raw(&self, t: S, limit: Limit) -> Result<S> {
        let from = self.spec.element_exposure(t, limit);
        let to = self.spec.element_exposure(t + S::one(), limit);
        let survival = S::one() - self.kernel.unavailability(from);
        if !(survival > S::zero()) {
            return Err(Error::CertainFailure { t: t.as_f64() });
        }
        Ok(self.kernel.increment(from, to) / survival)
    }

    /// One-hour conditional unreliability at `t ∈ [0, T1]`.
    pub fn pfh_instant(&self, t: S) -> Result<Evaluation<S>> {
        self.spec.check_time(t)?;
        let raw = self.pfh_raw(t, Limit::Right)?;
        if raw < S::zero() {
            return Ok(Evaluation::exact(S::zero()).with_warning(Warning::NegativeWindowsClamped { windows: 1 }));
        }
        Ok(Evaluation::exact(raw))
    }

    /// `1 - (1/T1) ∫_0^{T1} (1 - PFD(t+1h)) / (1 - PFD(t)) dt` by adaptive
    /// Simpson, split at every partial test, one hour before each, and at
    /// `T1 - 1 h`.
    pub fn pfh_average(&self) -> Result<Evaluation<S>> {
        self.pfh_average_with(SimpsonConfig::default())
    }

    pub fn pfh_average_with(&self, config: SimpsonConfig<S>) -> Result<Evaluation<S>> {
        let t1 = self.spec.full_test_period();
        let hour = S::one();
        let instants: Vec<S> = if self.spec.test_policy().has_effective_partial_tests() {
            self.spec.test_policy().partial_test_instants().collect()
        } else {
            Vec::new()
        };
        let interior = instants
            .iter()
            .flat_map(|&p| [p - hour, p])
            .chain(std::iter::once(t1 - hour));
        let ks = knots(S::zero(), t1, interior);

        let mut integrand = |t: S, limit: Limit| self.pfh_raw(t, limit).map(|raw| raw.max(S::zero()));
        let q = integrate_piecewise(&mut integrand, &ks, config)?;

        let mut straddling = 0;
        for &p in &instants {
            let probe = (p - hour / S::lit(2.0)).max(S::zero());
            if self.pfh_raw(probe, Limit::Right)? < S::zero() {
                straddling += 1;
            }
        }
        let evaluation = Evaluation::exact(q.integral / t1);
        Ok(if straddling > 0 {
            evaluation.with_warning(Warning::NegativeWindowsClamped { windows: straddling })
        } else {
            evaluation
        })
    }

    /// PFD(t) sampled on a uniform grid of `samples_per_period` points inside
    /// each interval between effective tests. At a partial-test instant the
    /// pre-test point is emitted first, then the post-test one.
    pub fn pfd_curve(&self, samples_per_period: usize) -> Result<Vec<CurvePoint<S>>> {
        curve_instants(&self.spec, samples_per_period)?
            .into_iter()
            .map(|(t, limit)| {
                Ok(CurvePoint {
                    t_hours: t,
                    value: self.pfd_at(t, limit)?,
                })
            })
            .collect()
    }
}

/// Sampling instants for a PFD(t) trace: `samples_per_period` evenly spaced
/// points on each interval `[p T0, (p+1) T0]` between effective tests, each
/// interval's end point taken as a left limit. Times are nondecreasing and
/// repeat only at partial-test instants.
pub fn curve_instants<S: Scalar>(spec: &BarrierSpec<S>, samples_per_period: usize) -> Result<Vec<(S, Limit)>> {
    if samples_per_period < 2 {
        return Err(Error::Domain(format!(
            "curve needs at least 2 samples per period, got {samples_per_period}"
        )));
    }
    let policy = spec.test_policy();
    let periods = if policy.has_effective_partial_tests() {
        policy.partial_test_count()
    } else {
        1
    };
    let bound = |p: u32| {
        if periods == 1 {
            if p == 0 {
                S::zero()
            } else {
                spec.full_test_period()
            }
        } else {
            policy.instant(p)
        }
    };
    let last = S::count((samples_per_period - 1) as u64);
    let mut out = Vec::with_capacity(periods as usize * samples_per_period);
    for p in 0..periods {
        let (start, end) = (bound(p), bound(p + 1));
        for i in 0..samples_per_period {
            let (t, limit) = if i == samples_per_period - 1 {
                (end, Limit::Left)
            } else {
                (start + (end - start) * S::count(i as u64) / last, Limit::Right)
            };
            out.push((t, limit));
        }
    }
    Ok(out)
}

pub fn reliability<S: Scalar>(spec: &BarrierSpec<S>, t: S) -> Result<S> {
    ExactModel::new(*spec).reliability(t)
}

pub fn pfd_instant<S: Scalar>(spec: &BarrierSpec<S>, t: S) -> Result<S> {
    ExactModel::new(*spec).pfd_instant(t)
}

pub fn pfd_average<S: Scalar>(spec: &BarrierSpec<S>) -> Evaluation<S> {
    ExactModel::new(*spec).pfd_average()
}

pub fn pfh_instant<S: Scalar>(spec: &BarrierSpec<S>, t: S) -> Result<Evaluation<S>> {
    ExactModel::new(*spec).pfh_instant(t)
}

pub fn pfh_average<S: Scalar>(spec: &BarrierSpec<S>) -> Result<Evaluation<S>> {
    ExactModel::new(*spec).pfh_average()
}

pub fn pfd_curve<S: Scalar>(spec: &BarrierSpec<S>, samples_per_period: usize) -> Result<Vec<CurvePoint<S>>> {
    ExactModel::new(*spec).pfd_curve(samples_per_period)
}
