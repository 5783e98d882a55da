//! Adaptive Simpson quadrature with Richardson correction.

use crate::error::{Error, Result};
use crate::model::Limit;
use crate::scalar::{CompensatedSum, Scalar};

#[derive(Debug, Clone, Copy)]
pub struct SimpsonConfig<S> {
    /// Absolute tolerance on the *mean* of the integrand over the whole
    /// domain; the tolerance on the integral scales with the domain length.
    pub tolerance: S,
    pub max_depth: u32,
    /// Subdivisions forced before the error test is trusted.
    pub min_depth: u32,
}

impl<S: Scalar> Default for SimpsonConfig<S> {
    fn default() -> Self {
        Self {
            tolerance: S::lit(1e-12),
            max_depth: 40,
            min_depth: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<S> {
    pub integral: S,
    pub evaluations: usize,
}

struct Panel<S> {
    a: S,
    fa: S,
    m: S,
    fm: S,
    b: S,
    fb: S,
    whole: S,
}

struct Integrator<'f, S, F> {
    f: &'f mut F,
    config: SimpsonConfig<S>,
    evaluations: usize,
}

impl<S: Scalar, F: FnMut(S, Limit) -> Result<S>> Integrator<'_, S, F> {
    fn eval(&mut self, x: S) -> Result<S> {
        self.eval_limit(x, Limit::Right)
    }

    fn eval_limit(&mut self, x: S, limit: Limit) -> Result<S> {
        self.evaluations += 1;
        (self.f)(x, limit)
    }

    fn panel(&mut self, a: S, fa: S, b: S, fb: S) -> Result<Panel<S>> {
        let m = (a + b) / S::lit(2.0);
        let fm = self.eval(m)?;
        let whole = (b - a) / S::lit(6.0) * (fa + S::lit(4.0) * fm + fb);
        Ok(Panel { a, fa, m, fm, b, fb, whole })
    }

    fn refine(&mut self, p: Panel<S>, tolerance: S, depth: u32, acc: &mut CompensatedSum<S>) -> Result<()> {
        let left = self.panel(p.a, p.fa, p.m, p.fm)?;
        let right = self.panel(p.m, p.fm, p.b, p.fb)?;
        let delta = left.whole + right.whole - p.whole;
        let converged = depth >= self.config.min_depth && delta.abs() <= S::lit(15.0) * tolerance;
        if converged {
            acc.add(left.whole + right.whole + delta / S::lit(15.0));
            return Ok(());
        }
        if depth >= self.config.max_depth || p.m <= p.a || p.b <= p.m {
            return Err(Error::QuadratureNotConverged {
                a: p.a.as_f64(),
                b: p.b.as_f64(),
                estimate: (delta / S::lit(15.0)).abs().as_f64(),
                tolerance: tolerance.as_f64(),
                depth,
            });
        }
        let half = tolerance / S::lit(2.0);
        self.refine(left, half, depth + 1, acc)?;
        self.refine(right, half, depth + 1, acc)
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<S, F>(mut f: F, a: S, b: S, config: SimpsonConfig<S>) -> Result<Quadrature<S>>
where
    S: Scalar,
    F: FnMut(S) -> Result<S>,
{
    integrate_piecewise(&mut |x, _| f(x), &[a, b], config)
}

/// Integrates `f` over `[knots[0], knots[last]]`, restarting the adaptive
/// scheme on every piece so that kinks and jumps at the knots do not stall
/// refinement. The right end of each piece is requested with
/// [`Limit::Left`], every other point with [`Limit::Right`], so a
/// right-continuous integrand with jumps at the knots is integrated exactly
/// as its continuous per-piece branches.
pub fn integrate_piecewise<S, F>(f: &mut F, knots: &[S], config: SimpsonConfig<S>) -> Result<Quadrature<S>>
where
    S: Scalar,
    F: FnMut(S, Limit) -> Result<S>,
{
    if knots.len() < 2 {
        return Err(Error::Domain("quadrature needs at least two knots".into()));
    }
    if knots.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("quadrature knots must be strictly increasing".into()));
    }
    let mut integrator = Integrator {
        f,
        config,
        evaluations: 0,
    };
    let mut acc = CompensatedSum::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let tolerance = config.tolerance * (b - a);
        let fa = integrator.eval(a)?;
        let fb = integrator.eval_limit(b, Limit::Left)?;
        let panel = integrator.panel(a, fa, b, fb)?;
        integrator.refine(panel, tolerance, 1, &mut acc)?;
    }
    Ok(Quadrature {
        integral: acc.value(),
        evaluations: integrator.evaluations,
    })
}

/// Builds the sorted, deduplicated knot list `{a, b} ∪ (interior ∩ (a, b))`.
pub fn knots<S: Scalar>(a: S, b: S, interior: impl IntoIterator<Item = S>) -> Vec<S> {
    let mut knots: Vec<S> = interior.into_iter().filter(|&x| x > a && x < b).collect();
    knots.push(a);
    knots.push(b);
    knots.sort_by(|x, y| x.partial_cmp(y).expect("finite knots"));
    knots.dedup();
    knots
}
