//! Barrier unavailability as a function of per-element exposure.
//!
//! With every element down independently with probability `1 - e^{-a}`,
//! the barrier unavailability is
//!
//! ```text
//! G(a) = 1 - Σ_{x=M}^{N} S(M, N, x) e^{-x a}
//! ```
//!
//! For small `a` the terms of that sum are `O(a)` while `G` is
//! `O(a^{N-M+1})`, so the sum is evaluated from its Taylor series instead:
//! `G(a) = Σ_j c_j a^j` with `c_j = (-1)^{j+1} m_j / j!` and the integer
//! moments `m_j = Σ_x S(M, N, x) x^j` computed exactly. The first `N - M`
//! moments vanish, so no cancellation is left between the leading terms.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::coefficients::coeff_s_unchecked;
use crate::model::Architecture;
use crate::scalar::{power_difference_quotient, CompensatedSum, Scalar};

/// Bound on `N a` below which the series is used. The relative condition
/// number of the series is at most `e^{2 N a}`.
const SERIES_LIMIT: f64 = 2.0;

/// Series terms kept beyond the leading one; `2^40 / 40!` is far below
/// `f64` resolution.
const EXTRA_TERMS: usize = 40;

#[derive(Debug, Clone)]
pub struct UnavailabilityKernel<S> {
    architecture: Architecture,
    /// `(x, S(M, N, x))` for `x = M..=N`.
    coefficients: Vec<(S, S)>,
    /// Taylor coefficients `c_j` for `j = lead..=lead + EXTRA_TERMS`.
    taylor: Vec<S>,
    lead: u32,
    series_limit: S,
}

impl<S: Scalar> UnavailabilityKernel<S> {
    pub fn new(architecture: Architecture) -> Self {
        let (m, n) = (architecture.m_required(), architecture.n_elements());
        let s_values: Vec<(u32, i64)> = (m..=n).map(|x| (x, coeff_s_unchecked(m, n, x))).collect();
        let lead = architecture.failures_to_defeat();

        let mut factorial = BigInt::one();
        let mut powers: Vec<BigInt> = s_values.iter().map(|_| BigInt::one()).collect();
        let mut taylor = Vec::with_capacity(EXTRA_TERMS + 1);
        for j in 1..=(lead as usize + EXTRA_TERMS) {
            factorial *= j;
            let mut moment = BigInt::zero();
            for ((x, s), power) in s_values.iter().zip(powers.iter_mut()) {
                *power *= *x;
                moment += &*power * *s;
            }
            if j < lead as usize {
                debug_assert!(moment.is_zero(), "moment {j} of {architecture} must vanish");
                continue;
            }
            let magnitude = big_ratio(&moment, &factorial);
            let c = if j % 2 == 1 { magnitude } else { -magnitude };
            taylor.push(S::lit(c));
        }

        Self {
            architecture,
            coefficients: s_values
                .into_iter()
                .map(|(x, s)| (S::count(x.into()), S::lit(s as f64)))
                .collect(),
            taylor,
            lead,
            series_limit: S::lit(SERIES_LIMIT) / S::count(n.into()),
        }
    }

    pub fn architecture(&self) -> Architecture {
        self.architecture
    }

    /// Leading Taylor coefficient; equals `C(N, M-1)`.
    pub fn leading_coefficient(&self) -> S {
        self.taylor[0]
    }

    #[inline]
    fn in_series_range(&self, a: S) -> bool {
        a <= self.series_limit
    }

    /// `G(a)`, barrier unavailability at per-element exposure `a >= 0`.
    pub fn unavailability(&self, a: S) -> S {
        if self.in_series_range(a) {
            self.unavailability_series(a)
        } else {
            self.unavailability_direct(a)
        }
    }

    /// `G(a)` from the Taylor series. Accurate for `N a` up to about 2.
    pub fn unavailability_series(&self, a: S) -> S {
        let poly = self.taylor.iter().rev().fold(S::zero(), |acc, &c| acc * a + c);
        poly * a.powi(self.lead as i32)
    }

    /// `G(a) = Σ_x S(M, N, x) (1 - e^{-x a})`, using `Σ_x S = 1`.
    pub fn unavailability_direct(&self, a: S) -> S {
        self.coefficients
            .iter()
            .map(|&(x, s)| -s * (-x * a).exp_m1())
            .collect::<CompensatedSum<S>>()
            .value()
    }

    /// `G(to) - G(from)` without subtracting two rounded values when both
    /// exposures are small.
    pub fn increment(&self, from: S, to: S) -> S {
        if self.in_series_range(from.max(to)) {
            // Σ_j c_j (to^j - from^j) = (to - from) Σ_j c_j h_j(to, from)
            let mut h = power_difference_quotient(to, from, self.lead);
            let mut from_pow = from.powi(self.lead as i32);
            let mut acc = CompensatedSum::new();
            for &c in &self.taylor {
                acc.add(c * h);
                h = h * to + from_pow;
                from_pow = from_pow * from;
            }
            (to - from) * acc.value()
        } else {
            let delta = to - from;
            self.coefficients
                .iter()
                .map(|&(x, s)| s * (-x * from).exp() * -(-x * delta).exp_m1())
                .collect::<CompensatedSum<S>>()
                .value()
        }
    }

    /// Mean of `G` over the exposure segment `[start, start + width]`.
    pub fn segment_mean(&self, start: S, width: S) -> S {
        if width == S::zero() {
            return self.unavailability(start);
        }
        let end = start + width;
        if self.in_series_range(end) {
            // (1/w) ∫ a^j da = h_{j+1}(end, start) / (j + 1)
            let mut power = self.lead + 1;
            let mut h = power_difference_quotient(end, start, power);
            let mut start_pow = start.powi(self.lead as i32 + 1);
            let mut acc = CompensatedSum::new();
            for &c in &self.taylor {
                acc.add(c * h / S::count(power.into()));
                h = h * end + start_pow;
                start_pow = start_pow * start;
                power += 1;
            }
            acc.value()
        } else {
            self.coefficients
                .iter()
                .map(|&(x, s)| {
                    let decay = (-x * start).exp();
                    s * (-(-x * start).exp_m1() + decay * one_minus_mean_survival(x * width))
                })
                .collect::<CompensatedSum<S>>()
                .value()
        }
    }

    /// Closed-form mean with the partial-test residue sums:
    /// `Σ_x S (1 - T_x (1 - e^{-x u}) / (x u))` with `u` the exposure of one
    /// partial-test period.
    pub fn closed_form_mean(&self, partial_tests: u32, coverage: S, period_exposure: S) -> S {
        self.coefficients
            .iter()
            .map(|&(x, s)| {
                let xi = x.to_u32().unwrap_or(0);
                let (t, one_minus_t) = crate::coefficients::coeff_t_pair(partial_tests, coverage, period_exposure, xi);
                s * (one_minus_t + t * one_minus_mean_survival(x * period_exposure))
            })
            .collect::<CompensatedSum<S>>()
            .value()
    }
}

/// `1 - (1 - e^{-z}) / z`, accurate for small `z`.
pub(crate) fn one_minus_mean_survival<S: Scalar>(z: S) -> S {
    if z == S::zero() {
        return S::zero();
    }
    if z.abs() < S::lit(0.1) {
        // z/2! - z^2/3! + z^3/4! - ...
        let mut term = z / S::lit(2.0);
        let mut acc = CompensatedSum::new();
        for k in 2..=24u64 {
            acc.add(term);
            term = -term * z / S::count(k + 1);
        }
        acc.value()
    } else {
        (z + (-z).exp_m1()) / z
    }
}

fn big_ratio(num: &BigInt, den: &BigInt) -> f64 {
    let n = num.to_f64().unwrap_or(f64::INFINITY);
    let d = den.to_f64().unwrap_or(f64::INFINITY);
    if n.is_finite() && d.is_finite() {
        return n / d;
    }
    // Shift both down until they fit; only reachable for huge indices.
    let shift = num.bits().max(den.bits()).saturating_sub(1000);
    let n = (num >> shift).to_f64().unwrap_or(0.0);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::binomial;

    fn kernel(m: u32, n: u32) -> UnavailabilityKernel<f64> {
        UnavailabilityKernel::new(Architecture::new(m, n).unwrap())
    }

    /// Independent route: P(fewer than M of N up) as a binomial tail, all
    /// terms positive.
    fn tail(m: u32, n: u32, a: f64) -> f64 {
        let up = (-a).exp();
        let down = -(-a).exp_m1();
        (0..m)
            .map(|k| binomial(n, k).unwrap() as f64 * up.powi(k as i32) * down.powi((n - k) as i32))
            .sum()
    }

    #[test]
    fn leading_coefficient_is_binomial() {
        for n in 1..=20 {
            for m in 1..=n {
                let k = kernel(m, n);
                let expected = binomial(n, m - 1).unwrap() as f64;
                assert!((k.leading_coefficient() - expected).abs() <= 1e-15 * expected, "{m}oo{n}");
            }
        }
    }

    #[test]
    fn series_and_tail_agree_relatively() {
        for n in 1..=20 {
            for m in 1..=n {
                let k = kernel(m, n);
                for &a in &[1e-9, 1e-6, 1e-4, 1e-2, 0.05, 1.9 / n as f64] {
                    let g = k.unavailability(a);
                    let t = tail(m, n, a);
                    if t < 1e-300 {
                        continue;
                    }
                    assert!((g - t).abs() <= 1e-12 * t, "{m}oo{n} a={a}: {g} vs {t}");
                }
            }
        }
    }

    #[test]
    fn direct_and_series_agree_where_both_are_accurate() {
        for n in 1..=4 {
            for m in 1..=n {
                let k = kernel(m, n);
                for &a in &[0.05, 0.1, 0.3, 0.45] {
                    let s = k.unavailability_series(a);
                    let d = k.unavailability_direct(a);
                    assert!((s - d).abs() < 1e-14, "{m}oo{n} a={a}");
                }
            }
        }
    }

    #[test]
    fn large_exposure_uses_direct_route() {
        let k = kernel(2, 3);
        let a = 3.0;
        assert!((k.unavailability(a) - tail(2, 3, a)).abs() < 1e-14);
    }

    #[test]
    fn increment_matches_difference() {
        let k = kernel(2, 4);
        for &(a, b) in &[(1e-3, 1.1e-3), (0.2, 0.21), (2.0, 2.5), (0.3, 0.1)] {
            let inc = k.increment(a, b);
            let diff = tail(2, 4, b) - tail(2, 4, a);
            assert!((inc - diff).abs() <= 1e-12 * diff.abs().max(1e-300), "{a} {b}: {inc} vs {diff}");
        }
    }

    #[test]
    fn segment_mean_matches_midpoint_rule() {
        let k = kernel(1, 3);
        for &(start, width) in &[(0.0, 1e-3), (2e-3, 1e-3), (0.5, 0.4), (1.0, 2.0)] {
            let steps = 20_000;
            let h = width / steps as f64;
            let mid: f64 = (0..steps).map(|i| tail(1, 3, start + (i as f64 + 0.5) * h)).sum::<f64>() / steps as f64;
            let mean = k.segment_mean(start, width);
            assert!((mean - mid).abs() <= 1e-8 * mid, "{start} {width}: {mean} vs {mid}");
        }
        assert_eq!(k.segment_mean(0.1, 0.0), k.unavailability(0.1));
    }

    #[test]
    fn one_minus_mean_survival_branches_meet() {
        let below = one_minus_mean_survival(0.0999999f64);
        let above = (0.0999999 + (-0.0999999f64).exp_m1()) / 0.0999999;
        assert!((below - above).abs() < 1e-15);
        assert!((one_minus_mean_survival(1e-8f64) - (0.5e-8 - 1e-16 / 6.0)).abs() < 1e-24);
    }
}
