//! Barrier description: voting architecture, proof-test policy and the
//! evaluation result carried back by every evaluator.

use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported element count. Keeps every binomial coefficient and
/// every `S(M, N, x)` comfortably inside `i64`.
pub const MAX_ELEMENTS: u32 = 20;

/// MooN voting: the barrier works iff at least `M` of its `N` elements work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Architecture {
    m_required: u32,
    n_elements: u32,
}

impl Architecture {
    pub fn new(m_required: u32, n_elements: u32) -> Result<Self> {
        if m_required == 0 || m_required > n_elements || n_elements > MAX_ELEMENTS {
            return Err(Error::InvalidArchitecture {
                m: m_required,
                n: n_elements,
            });
        }
        Ok(Self {
            m_required,
            n_elements,
        })
    }

    #[inline]
    pub fn m_required(&self) -> u32 {
        self.m_required
    }

    #[inline]
    pub fn n_elements(&self) -> u32 {
        self.n_elements
    }

    /// Number of element failures that defeat the barrier, `N - M + 1`.
    #[inline]
    pub fn failures_to_defeat(&self) -> u32 {
        self.n_elements - self.m_required + 1
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}oo{}", self.m_required, self.n_elements)
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("architecture {s:?} is not of the form MooN"));
        let (m, n) = s.to_ascii_lowercase().split_once("oo").map(|(m, n)| (m.to_owned(), n.to_owned())).ok_or_else(bad)?;
        let m = m.trim().parse().map_err(|_| bad())?;
        let n = n.trim().parse().map_err(|_| bad())?;
        Architecture::new(m, n)
    }
}

/// Which side of a proof-test instant a time refers to. Values are
/// right-continuous: `Right` is the post-test value, `Left` the pre-test one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Limit {
    Left,
    #[default]
    Right,
}

/// Full proof tests every `T1` hours, with `n - 1` partial tests evenly
/// spaced inside each full-test interval (partial period `T0 = T1 / n`).
/// A partial test reveals the fraction `E` of each element's failure modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestPolicy<S> {
    full_test_period: S,
    partial_test_count: u32,
    partial_coverage: S,
}

impl<S: Scalar> TestPolicy<S> {
    pub fn new(full_test_period_hours: S, partial_test_count: u32, partial_coverage: S) -> Result<Self> {
        if !(full_test_period_hours.is_finite() && full_test_period_hours > S::zero()) {
            return Err(Error::InvalidTestPolicy(format!(
                "full-test period must be positive and finite, got {full_test_period_hours}"
            )));
        }
        if partial_test_count == 0 {
            return Err(Error::InvalidTestPolicy("partial test count n must be >= 1".into()));
        }
        if !(partial_coverage >= S::zero() && partial_coverage <= S::one()) {
            return Err(Error::InvalidTestPolicy(format!(
                "partial coverage must lie in [0, 1], got {partial_coverage}"
            )));
        }
        let policy = Self {
            full_test_period: full_test_period_hours,
            partial_test_count,
            partial_coverage,
        };
        if !(policy.partial_test_period() > S::zero()) {
            return Err(Error::InvalidTestPolicy("partial test period T1/n underflows".into()));
        }
        Ok(policy)
    }

    /// Full proof tests only.
    pub fn full_only(full_test_period_hours: S) -> Result<Self> {
        Self::new(full_test_period_hours, 1, S::zero())
    }

    #[inline]
    pub fn full_test_period(&self) -> S {
        self.full_test_period
    }

    #[inline]
    pub fn partial_test_count(&self) -> u32 {
        self.partial_test_count
    }

    #[inline]
    pub fn partial_coverage(&self) -> S {
        self.partial_coverage
    }

    /// `T0 = T1 / n`.
    #[inline]
    pub fn partial_test_period(&self) -> S {
        self.full_test_period / S::count(self.partial_test_count.into())
    }

    /// `n > 1` and `E > 0`.
    #[inline]
    pub fn has_effective_partial_tests(&self) -> bool {
        self.partial_test_count > 1 && self.partial_coverage > S::zero()
    }

    /// Times of the partial tests inside one full-test interval, `p T0` for
    /// `p = 1..n-1`. The test at `T1 = n T0` is the full test.
    pub fn partial_test_instants(&self) -> impl Iterator<Item = S> + '_ {
        (1..self.partial_test_count).map(move |p| self.instant(p))
    }

    /// `p T0`, computed as `p T1 / n` so that `instant(n) == T1` exactly.
    #[inline]
    pub fn instant(&self, p: u32) -> S {
        S::count(p.into()) * self.full_test_period / S::count(self.partial_test_count.into())
    }

    /// Index `p` of the partial-test interval `[p T0, (p+1) T0)` containing
    /// `t`, capped at `n - 1`: there is no partial test at or beyond `T1`.
    /// Times within a few ulps of a test instant are snapped onto it.
    pub fn interval_index(&self, t: S, limit: Limit) -> u32 {
        let n = self.partial_test_count;
        if n == 1 || !(t > S::zero()) {
            return 0;
        }
        let ratio = t * S::count(n.into()) / self.full_test_period;
        let nearest = ratio.round();
        let on_instant = (ratio - nearest).abs() <= S::epsilon() * S::lit(8.0) * nearest.max(S::one());
        let mut index = if on_instant { nearest } else { ratio.floor() }
            .to_u64()
            .unwrap_or(u64::MAX);
        if on_instant && limit == Limit::Left {
            index = index.saturating_sub(1);
        }
        index.min(u64::from(n - 1)) as u32
    }
}

/// Architecture, element failure rate and proof-test policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSpec<S> {
    architecture: Architecture,
    failure_rate: S,
    test_policy: TestPolicy<S>,
}

impl<S: Scalar> BarrierSpec<S> {
    pub fn new(architecture: Architecture, failure_rate_per_hour: S, test_policy: TestPolicy<S>) -> Result<Self> {
        if !(failure_rate_per_hour.is_finite() && failure_rate_per_hour > S::zero()) {
            return Err(Error::InvalidFailureRate(failure_rate_per_hour.as_f64()));
        }
        Ok(Self {
            architecture,
            failure_rate: failure_rate_per_hour,
            test_policy,
        })
    }

    #[inline]
    pub fn architecture(&self) -> Architecture {
        self.architecture
    }

    #[inline]
    pub fn failure_rate(&self) -> S {
        self.failure_rate
    }

    #[inline]
    pub fn test_policy(&self) -> &TestPolicy<S> {
        &self.test_policy
    }

    #[inline]
    pub fn full_test_period(&self) -> S {
        self.test_policy.full_test_period
    }

    /// `λ T1`, the dimensionless exposure governing approximation validity.
    #[inline]
    pub fn lambda_t1(&self) -> S {
        self.failure_rate * self.test_policy.full_test_period
    }

    /// The same barrier with partial tests removed.
    pub fn without_partial_tests(&self) -> Self {
        Self {
            test_policy: TestPolicy {
                partial_test_count: 1,
                partial_coverage: S::zero(),
                ..self.test_policy
            },
            ..*self
        }
    }

    /// Same barrier with a different policy.
    pub fn with_test_policy(&self, test_policy: TestPolicy<S>) -> Self {
        Self { test_policy, ..*self }
    }

    /// Per-element cumulative hazard still unrevealed at `t`:
    /// `λ t - E λ p T0` with `p` the index of the current partial-test
    /// interval. Each element is down at `t` with probability
    /// `1 - exp(-exposure)`. Valid beyond `T1` as an extension of the last
    /// interval (no renewal).
    pub fn element_exposure(&self, t: S, limit: Limit) -> S {
        let p = self.test_policy.interval_index(t, limit);
        if p == 0 || self.test_policy.partial_coverage == S::zero() {
            return self.failure_rate * t;
        }
        let since_test = t - self.test_policy.instant(p);
        let revealed_before = (S::one() - self.test_policy.partial_coverage) * self.test_policy.instant(p);
        self.failure_rate * (revealed_before + since_test.max(S::zero()))
    }

    pub(crate) fn check_time(&self, t: S) -> Result<()> {
        if !(t >= S::zero() && t <= self.full_test_period()) {
            return Err(Error::TimeOutOfRange {
                t: t.as_f64(),
                t1: self.full_test_period().as_f64(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Approximate,
    Simulated,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Approximate => "approximate",
            Method::Simulated => "simulated",
        })
    }
}

/// Validity note attached to an [`Evaluation`].
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// `λ T1` at or above the small-exposure threshold of the approximations.
    OutsideApproximationDomain { lambda_t1: f64, threshold: f64 },
    /// Raw value fell outside `[0, 1]` and was clamped.
    Clamped { raw: f64 },
    /// Lookahead windows straddling a partial test gave a negative one-hour
    /// unreliability; those contributions were clamped to zero.
    NegativeWindowsClamped { windows: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::OutsideApproximationDomain { lambda_t1, threshold } => write!(
                f,
                "lambda*T1 = {lambda_t1:e} is not below {threshold:e}; approximation outside its validity domain"
            ),
            Warning::Clamped { raw } => write!(f, "raw value {raw:e} clamped to [0, 1]"),
            Warning::NegativeWindowsClamped { windows } => write!(
                f,
                "{windows} one-hour window(s) straddle a partial test; negative contributions clamped to 0"
            ),
        }
    }
}

/// A computed probability with the method that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<S> {
    value: S,
    method: Method,
    warnings: Vec<Warning>,
    std_error: Option<S>,
}

impl<S: Scalar> Evaluation<S> {
    pub fn exact(value: S) -> Self {
        Self::clamped(value, Method::Exact, None)
    }

    pub fn approximate(value: S) -> Self {
        Self::clamped(value, Method::Approximate, None)
    }

    pub fn simulated(value: S, std_error: S) -> Self {
        Self::clamped(value, Method::Simulated, Some(std_error.max(S::zero())))
    }

    fn clamped(raw: S, method: Method, std_error: Option<S>) -> Self {
        let value = raw.max(S::zero()).min(S::one());
        let mut warnings = Vec::new();
        if value != raw {
            warnings.push(Warning::Clamped { raw: raw.as_f64() });
        }
        Self {
            value,
            method,
            warnings,
            std_error,
        }
    }

    pub fn with_warning(mut self, warning: Warning) -> Self {
        self.warnings.push(warning);
        self
    }

    #[inline]
    pub fn value(&self) -> S {
        self.value
    }

    #[inline]
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    #[inline]
    pub fn std_error(&self) -> Option<S> {
        self.std_error
    }
}
