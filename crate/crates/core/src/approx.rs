//! First-order small-exposure approximations.
//!
//! Each leading term of the exact series is kept, i.e. `G(a) ≈ C(N, M-1) a^k`
//! with `k = N - M + 1`. Since `1 - e^{-a} <= a` and the union bound holds,
//! every formula here is conservative (never below the exact value).
//! Results outside `λ T1 < 1e-2` are still returned, with a warning.

use crate::coefficients::{binomial_unchecked, coeff_v};
use crate::error::{Error, Result};
use crate::exact::ExactModel;
use crate::model::{BarrierSpec, Evaluation, Limit, Warning};
use crate::scalar::Scalar;

/// Upper bound on `λ T1` for the approximations to be trusted.
pub const APPROXIMATION_THRESHOLD: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport<S> {
    pub lambda_t1: S,
    pub within_domain: bool,
    pub threshold: S,
}

pub fn validity<S: Scalar>(spec: &BarrierSpec<S>) -> ValidityReport<S> {
    let lambda_t1 = spec.lambda_t1();
    let threshold = S::lit(APPROXIMATION_THRESHOLD);
    ValidityReport {
        lambda_t1,
        within_domain: lambda_t1 < threshold,
        threshold,
    }
}

/// An approximate value with its validity report. The evaluation already
/// carries an `OutsideApproximationDomain` warning when applicable.
#[derive(Debug, Clone, PartialEq)]
pub struct Approximate<S> {
    pub value: Evaluation<S>,
    pub validity: ValidityReport<S>,
}

impl<S: Scalar> Approximate<S> {
    fn new(raw: S, spec: &BarrierSpec<S>) -> Self {
        let validity = validity(spec);
        let mut value = Evaluation::approximate(raw);
        if !validity.within_domain {
            value = value.with_warning(Warning::OutsideApproximationDomain {
                lambda_t1: validity.lambda_t1.as_f64(),
                threshold: validity.threshold.as_f64(),
            });
        }
        Self { value, validity }
    }

    #[inline]
    pub fn get(&self) -> S {
        self.value.value()
    }
}

fn leading<S: Scalar>(spec: &BarrierSpec<S>) -> (S, i32) {
    let arch = spec.architecture();
    let c = S::count(binomial_unchecked(arch.n_elements(), arch.m_required() - 1));
    (c, arch.failures_to_defeat() as i32)
}

fn require_basic<S: Scalar>(spec: &BarrierSpec<S>) -> Result<()> {
    if spec.test_policy().has_effective_partial_tests() {
        return Err(Error::PartialTestsUnsupported);
    }
    Ok(())
}

/// `C(N, M-1) (λ t - E λ p T0)^{N-M+1}`, with the same interval convention
/// as the exact evaluator.
pub fn pfd_instant_approx<S: Scalar>(spec: &BarrierSpec<S>, t: S) -> Result<Approximate<S>> {
    pfd_at_approx(spec, t, Limit::Right)
}

pub fn pfd_at_approx<S: Scalar>(spec: &BarrierSpec<S>, t: S, limit: Limit) -> Result<Approximate<S>> {
    spec.check_time(t)?;
    let (c, k) = leading(spec);
    let a = spec.element_exposure(t, limit);
    Ok(Approximate::new(c * a.powi(k), spec))
}

/// `C(N, M-1) (λ T0)^{N-M+1} V(M, N, n, E) / (N-M+2)`; with no effective
/// partial tests this is `C(N, M-1) (λ T1)^{N-M+1} / (N-M+2)`.
pub fn pfd_average_approx<S: Scalar>(spec: &BarrierSpec<S>) -> Approximate<S> {
    let arch = spec.architecture();
    let (c, k) = leading(spec);
    let policy = spec.test_policy();
    let (n, coverage) = if policy.has_effective_partial_tests() {
        (policy.partial_test_count(), policy.partial_coverage())
    } else {
        (1, S::zero())
    };
    let u = spec.failure_rate() * spec.full_test_period() / S::count(n.into());
    let v = coeff_v(arch.m_required(), arch.n_elements(), n, coverage).expect("validated spec");
    Approximate::new(c * u.powi(k) * v / S::count((k + 1) as u64), spec)
}

/// Barrier failure rate `C(N, M) M λ^{N-M+1} t^{N-M}` (per hour), basic
/// specs only. Integrates to [`pfd_instant_approx`].
pub fn barrier_rate_approx<S: Scalar>(spec: &BarrierSpec<S>, t: S) -> Result<S> {
    require_basic(spec)?;
    spec.check_time(t)?;
    let arch = spec.architecture();
    let c = S::count(binomial_unchecked(arch.n_elements(), arch.m_required()) * u64::from(arch.m_required()));
    let k = arch.failures_to_defeat() as i32;
    Ok(c * spec.failure_rate().powi(k) * t.powi(k - 1))
}

/// `C(N, M-1) λ^{N-M+1} T1^{N-M} · 1 h`, basic specs only.
pub fn pfh_average_approx<S: Scalar>(spec: &BarrierSpec<S>) -> Result<Approximate<S>> {
    require_basic(spec)?;
    let (c, k) = leading(spec);
    let raw = c * spec.failure_rate().powi(k) * spec.full_test_period().powi(k - 1);
    Ok(Approximate::new(raw, spec))
}

/// The two PFH estimates obtained from PFD values, both per one hour.
#[derive(Debug, Clone, PartialEq)]
pub struct PfhFromPfd<S> {
    /// `PFD(T1) / T1 · 1 h`.
    pub from_end_of_interval: Approximate<S>,
    /// `PFD_avg (N-M+2) / T1 · 1 h`.
    pub from_average: Approximate<S>,
}

/// PFH from the exact PFD at the end of the interval and from the exact
/// average PFD. Basic specs only.
pub fn pfh_from_pfd_approx<S: Scalar>(spec: &BarrierSpec<S>) -> Result<PfhFromPfd<S>> {
    require_basic(spec)?;
    let model = ExactModel::new(*spec);
    let t1 = spec.full_test_period();
    let end = model.pfd_instant(t1)?;
    let avg = model.pfd_average().value();
    let k = S::count(spec.architecture().failures_to_defeat().into());
    Ok(PfhFromPfd {
        from_end_of_interval: Approximate::new(end / t1, spec),
        from_average: Approximate::new(avg * (k + S::one()) / t1, spec),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Architecture, TestPolicy};

    fn spec(m: u32, n: u32, lambda: f64, t1: f64, partial: u32, coverage: f64) -> BarrierSpec<f64> {
        BarrierSpec::new(
            Architecture::new(m, n).unwrap(),
            lambda,
            TestPolicy::new(t1, partial, coverage).unwrap(),
        )
        .unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn instant_examples() {
        let one = spec(1, 1, 1e-5, 720.0, 1, 0.0);
        assert!(rel(pfd_instant_approx(&one, 720.0).unwrap().get(), 7.2e-3) < 1e-15);
        let r = spec(2, 3, 1e-5, 720.0, 1, 0.0);
        let a = pfd_instant_approx(&r, 720.0).unwrap();
        assert!(rel(a.get(), 1.5552e-4) < 1e-14);
        assert!(a.validity.within_domain);
        assert!(a.value.warnings().is_empty());
        assert_eq!(pfd_instant_approx(&r, 0.0).unwrap().get(), 0.0);
        assert!(pfd_instant_approx(&r, 800.0).is_err());
    }

    #[test]
    fn instant_after_partial_test_loses_revealed_exposure() {
        let p = spec(2, 3, 1e-5, 720.0, 3, 0.5);
        let after = pfd_instant_approx(&p, 300.0).unwrap().get();
        assert!(rel(after, 3.0 * (1e-5f64 * 300.0 - 0.5 * 1e-5 * 240.0).powi(2)) < 1e-14);
        let before = pfd_at_approx(&p, 240.0, Limit::Left).unwrap().get();
        assert!(rel(before, 3.0 * 2.4e-3f64.powi(2)) < 1e-14);
    }

    #[test]
    fn average_examples() {
        let one = spec(1, 1, 1e-5, 720.0, 1, 0.0);
        assert!(rel(pfd_average_approx(&one).get(), 3.6e-3) < 1e-15);
        let r = spec(2, 3, 1e-5, 720.0, 1, 0.0);
        assert!(rel(pfd_average_approx(&r).get(), 5.184e-5) < 1e-14);
        let p = spec(2, 3, 1e-5, 720.0, 3, 0.5);
        assert!(rel(pfd_average_approx(&p).get(), 2.16e-5) < 1e-14);
    }

    #[test]
    fn rate_examples() {
        let one = spec(1, 1, 1e-5, 720.0, 1, 0.0);
        assert_eq!(barrier_rate_approx(&one, 0.0).unwrap(), 1e-5);
        assert_eq!(barrier_rate_approx(&one, 500.0).unwrap(), 1e-5);
        let r = spec(2, 3, 1e-5, 720.0, 1, 0.0);
        assert!(rel(barrier_rate_approx(&r, 720.0).unwrap(), 4.32e-7) < 1e-14);
        assert_eq!(barrier_rate_approx(&r, 0.0).unwrap(), 0.0);
        assert_eq!(
            barrier_rate_approx(&spec(2, 3, 1e-5, 720.0, 3, 0.5), 1.0),
            Err(Error::PartialTestsUnsupported)
        );
    }

    #[test]
    fn pfh_examples() {
        let one = spec(1, 1, 1e-5, 720.0, 1, 0.0);
        assert!(rel(pfh_average_approx(&one).unwrap().get(), 1e-5) < 1e-15);
        let r = spec(2, 3, 1e-5, 720.0, 1, 0.0);
        assert!(rel(pfh_average_approx(&r).unwrap().get(), 2.16e-7) < 1e-14);
        let two = spec(1, 2, 1e-5, 720.0, 1, 0.0);
        assert!(rel(pfh_average_approx(&two).unwrap().get(), 7.2e-8) < 1e-14);

        let forms = pfh_from_pfd_approx(&r).unwrap();
        assert!(rel(forms.from_end_of_interval.get(), 2.134_256_422_790_911_8e-7) < 1e-11);
        assert!(rel(forms.from_average.get(), 2.140_665_940_433_813e-7) < 1e-11);

        let forms = pfh_from_pfd_approx(&one).unwrap();
        // λ T1 / 2 · 2 / T1 collapses to λ at first order.
        assert!(rel(forms.from_average.get(), 1e-5) < 1e-2);
    }

    #[test]
    fn outside_domain_is_flagged_not_rejected() {
        let s = spec(1, 1, 0.5 / 720.0, 720.0, 1, 0.0);
        let a = pfd_average_approx(&s);
        assert!(!a.validity.within_domain);
        assert_eq!(a.value.warnings().len(), 1);
        assert!(matches!(a.value.warnings()[0], Warning::OutsideApproximationDomain { .. }));

        let boundary = validity(&spec(1, 1, 1e-5, 1000.0, 1, 0.0));
        assert!(!boundary.within_domain);

        // Polynomial blows past 1 and is clamped.
        let big = pfd_instant_approx(&spec(1, 3, 1e-2, 720.0, 1, 0.0), 720.0).unwrap();
        assert_eq!(big.get(), 1.0);
        assert!(big.value.warnings().iter().any(|w| matches!(w, Warning::Clamped { .. })));
    }

    #[test]
    fn rate_coefficient_integrates_to_pfd_coefficient() {
        // C(N, M) M / (N - M + 1) = C(N, M - 1)
        for n in 1..=20u32 {
            for m in 1..=n {
                let lhs = binomial_unchecked(n, m) * u64::from(m);
                let rhs = binomial_unchecked(n, m - 1) * u64::from(n - m + 1);
                assert_eq!(lhs, rhs, "{m}oo{n}");
            }
        }
        let s = spec(2, 4, 1e-4, 500.0, 1, 0.0);
        let steps = 10_000;
        let h = 300.0 / steps as f64;
        let integral: f64 = (0..steps)
            .map(|i| barrier_rate_approx(&s, (i as f64 + 0.5) * h).unwrap() * h)
            .sum();
        assert!(rel(integral, pfd_instant_approx(&s, 300.0).unwrap().get()) < 1e-6);
    }

    #[test]
    fn conservative_and_accurate_in_domain() {
        for n in 1..=4 {
            for m in 1..=n {
                for &(partial, coverage) in &[(1, 0.0), (3, 0.5), (4, 0.3), (2, 1.0)] {
                    let s = spec(m, n, 9e-3 / 720.0, 720.0, partial, coverage);
                    let exact = ExactModel::new(s);
                    for i in 0..=100 {
                        let t = 7.2 * i as f64;
                        let e = exact.pfd_instant(t).unwrap();
                        let a = pfd_instant_approx(&s, t).unwrap().get();
                        assert!(a >= e, "{m}oo{n} t={t}");
                        if e > 0.0 {
                            assert!(rel(a, e) <= 0.05);
                        }
                    }
                    let e = exact.pfd_average().value();
                    let a = pfd_average_approx(&s).get();
                    assert!(a >= e && rel(a, e) <= 0.05, "{m}oo{n} {partial} {coverage}: {a} vs {e}");
                }
            }
        }
    }
}
