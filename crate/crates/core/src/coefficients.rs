//! Time-independent sums shared by the closed forms.
//!
//! * `S(M, N, x)` turns the binomial reliability of a MooN barrier into a
//!   sum of pure exponentials `Σ_x S(M, N, x) e^{-x λ t}`.
//! * `T(n, E, λ, T0, x)` averages the exponential residue left after each
//!   partial test.
//! * `V(M, N, n, E)` is the matching factor of the small-exposure average.

use crate::error::{Error, Result};
use crate::model::MAX_ELEMENTS;
use crate::scalar::{power_difference_quotient, CompensatedSum, Scalar};

/// Exact binomial coefficient `C(n, k)` for `0 <= k <= n <= 20`.
pub fn binomial(n: u32, k: u32) -> Result<u64> {
    if k > n || n > MAX_ELEMENTS {
        return Err(Error::BinomialDomain { n, k });
    }
    Ok(binomial_unchecked(n, k))
}

pub(crate) fn binomial_unchecked(n: u32, k: u32) -> u64 {
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient, so the division
    // is exact.
    (0..u64::from(k)).fold(1u64, |acc, i| acc * (u64::from(n) - i) / (i + 1))
}

/// `S(M, N, x) = Σ_{k=M}^{x} C(N, x) C(x, k) (-1)^(x-k)`, exact.
pub fn coeff_s(m: u32, n: u32, x: u32) -> Result<i64> {
    if m == 0 || m > x || x > n || n > MAX_ELEMENTS {
        return Err(Error::CoefficientDomain { m, n, x });
    }
    Ok(coeff_s_unchecked(m, n, x))
}

pub(crate) fn coeff_s_unchecked(m: u32, n: u32, x: u32) -> i64 {
    let outer = binomial_unchecked(n, x) as i64;
    let inner: i64 = (m..=x)
        .map(|k| {
            let c = binomial_unchecked(x, k) as i64;
            if (x - k) % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .sum();
    outer * inner
}

fn check_partial_params<S: Scalar>(n: u32, coverage: S) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("partial test count n must be >= 1".into()));
    }
    if !(coverage >= S::zero() && coverage <= S::one()) {
        return Err(Error::Domain(format!("coverage E must lie in [0, 1], got {coverage}")));
    }
    Ok(())
}

/// `T(n, E, λ, T0, x) = (1/n) Σ_{p=0}^{n-1} exp(-x (1-E) λ p T0)`, in `(0, 1]`.
pub fn coeff_t<S: Scalar>(n: u32, coverage: S, failure_rate: S, partial_period: S, x: u32) -> Result<S> {
    check_partial_params(n, coverage)?;
    if !(failure_rate > S::zero() && partial_period > S::zero()) || x == 0 {
        return Err(Error::Domain(format!(
            "coeff_t requires lambda > 0, T0 > 0, x >= 1 (got {failure_rate}, {partial_period}, {x})"
        )));
    }
    Ok(coeff_t_pair(n, coverage, failure_rate * partial_period, x).0)
}

/// `(T, 1 - T)` with the complement accumulated from `expm1` terms so it
/// keeps full relative precision when `T` is close to 1.
pub(crate) fn coeff_t_pair<S: Scalar>(n: u32, coverage: S, exposure_per_period: S, x: u32) -> (S, S) {
    let step = S::count(x.into()) * (S::one() - coverage) * exposure_per_period;
    let mut kept = CompensatedSum::new();
    let mut lost = CompensatedSum::new();
    for p in 0..n {
        let z = -step * S::count(p.into());
        kept.add(z.exp());
        lost.add(-z.exp_m1());
    }
    let inv_n = S::count(n.into()).recip();
    (kept.value() * inv_n, lost.value() * inv_n)
}

/// `V(M, N, n, E) = (1/n) Σ_{p=0}^{n-1} [(1 + p(1-E))^(N-M+2) - (p(1-E))^(N-M+2)]`, `>= 1`.
pub fn coeff_v<S: Scalar>(m: u32, n_elements: u32, n: u32, coverage: S) -> Result<S> {
    if m == 0 || m > n_elements || n_elements > MAX_ELEMENTS {
        return Err(Error::InvalidArchitecture { m, n: n_elements });
    }
    check_partial_params(n, coverage)?;
    let power = n_elements - m + 2;
    let residue = S::one() - coverage;
    // x^k - y^k with x - y = 1, summed without cancellation.
    let total: CompensatedSum<S> = (0..n)
        .map(|p| {
            let y = S::count(p.into()) * residue;
            power_difference_quotient(y + S::one(), y, power)
        })
        .collect();
    Ok(total.value() / S::count(n.into()))
}
