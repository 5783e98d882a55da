//! Monte Carlo lifecycle simulation of a barrier over one full-test interval.
//!
//! Each element carries two independent failure processes: modes a partial
//! test can reveal (rate `E λ`, repaired at every partial test) and modes
//! only the full test reveals (rate `(1 - E) λ`). This split reproduces the
//! analytic exposure `λ t - E λ p T0` exactly. Histories are followed up to
//! `T1 + 1 h` with no renewal at `T1`, matching the exact evaluators'
//! lookahead convention.
//!
//! Trials run in fixed-size batches; batch `b` draws from a ChaCha8 stream
//! keyed by `(seed, b)`, and batch results are merged in index order, so
//! estimates are bit-identical across runs and thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Architecture, BarrierSpec, TestPolicy};

/// Trials per batch.
pub const BATCH_SIZE: u64 = 1 << 16;

/// Fewest "barrier up" samples a PFH stratum needs.
pub const MIN_CONDITIONING_EVENTS: u64 = 10;

/// Stream offset separating PFH draws from PFD draws under one seed.
const PFH_STREAM_BASE: u64 = 1 << 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub trials: u64,
    pub seed: u64,
    /// PFD: number of curve points `t_i = (i+1) T1 / g`. PFH: number of
    /// equal-width strata for the window start (before splitting at tests).
    pub grid_points: usize,
}

impl SimulationConfig {
    pub fn new(trials: u64, seed: u64, grid_points: usize) -> Result<Self> {
        let config = Self {
            trials,
            seed,
            grid_points,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidSimulationConfig("trials must be >= 1".into()));
        }
        if self.grid_points == 0 {
            return Err(Error::InvalidSimulationConfig("grid_points must be >= 1".into()));
        }
        Ok(())
    }

    pub fn batches(&self) -> u64 {
        self.trials.div_ceil(BATCH_SIZE)
    }

    fn batch_len(&self, batch: u64) -> u64 {
        (self.trials - batch * BATCH_SIZE).min(BATCH_SIZE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl Estimate {
    fn bernoulli(successes: u64, trials: u64) -> Self {
        let mean = successes as f64 / trials as f64;
        Self {
            mean,
            std_error: (mean * (1.0 - mean) / trials as f64).sqrt(),
            trials,
        }
    }

    /// `|mean - expected| <= k` standard errors.
    pub fn within(&self, expected: f64, k: f64) -> bool {
        (self.mean - expected).abs() <= k * self.std_error
    }

    /// Deviation in standard errors; infinite when a zero-variance estimate
    /// misses.
    pub fn z_score(&self, expected: f64) -> f64 {
        let d = (self.mean - expected).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Simulation input. Unlike [`BarrierSpec`] it admits `λ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulatedBarrier {
    architecture: Architecture,
    failure_rate: f64,
    policy: TestPolicy<f64>,
}

impl SimulatedBarrier {
    pub fn new(architecture: Architecture, failure_rate_per_hour: f64, policy: TestPolicy<f64>) -> Result<Self> {
        if !(failure_rate_per_hour.is_finite() && failure_rate_per_hour >= 0.0) {
            return Err(Error::InvalidFailureRate(failure_rate_per_hour));
        }
        Ok(Self {
            architecture,
            failure_rate: failure_rate_per_hour,
            policy,
        })
    }

    pub fn architecture(&self) -> Architecture {
        self.architecture
    }

    pub fn failure_rate(&self) -> f64 {
        self.failure_rate
    }

    pub fn test_policy(&self) -> &TestPolicy<f64> {
        &self.policy
    }
}

impl From<BarrierSpec<f64>> for SimulatedBarrier {
    fn from(spec: BarrierSpec<f64>) -> Self {
        Self {
            architecture: spec.architecture(),
            failure_rate: spec.failure_rate(),
            policy: *spec.test_policy(),
        }
    }
}

/// Down intervals `[start, end)` of one element; `end` is infinite when no
/// repair happens before the horizon.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ElementHistory {
    down: Vec<(f64, f64)>,
}

impl ElementHistory {
    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.down
    }

    pub fn is_down(&self, t: f64) -> bool {
        self.down.iter().any(|&(s, e)| s <= t && t < e)
    }

    pub fn ever_down(&self) -> bool {
        !self.down.is_empty()
    }
}

/// Samples one element trajectory over `[0, horizon]`.
pub fn simulate_element_history<R: Rng + ?Sized>(
    failure_rate: f64,
    policy: &TestPolicy<f64>,
    horizon: f64,
    rng: &mut R,
) -> ElementHistory {
    let mut history = ElementHistory::default();
    fill_history(&mut history, failure_rate, policy, horizon, rng);
    history
}

fn exp_time<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    if rate > 0.0 {
        let x: f64 = Exp1.sample(rng);
        x / rate
    } else {
        f64::INFINITY
    }
}

fn fill_history<R: Rng + ?Sized>(
    history: &mut ElementHistory,
    failure_rate: f64,
    policy: &TestPolicy<f64>,
    horizon: f64,
    rng: &mut R,
) {
    history.down.clear();
    if failure_rate == 0.0 {
        return;
    }
    if !policy.has_effective_partial_tests() {
        let t = exp_time(failure_rate, rng);
        if t <= horizon {
            history.down.push((t, f64::INFINITY));
        }
        return;
    }
    let coverage = policy.partial_coverage();
    let hidden = exp_time((1.0 - coverage) * failure_rate, rng);
    if hidden <= horizon {
        history.down.push((hidden, f64::INFINITY));
    }
    let n = policy.partial_test_count();
    let revealed_rate = coverage * failure_rate;
    for p in 0..n {
        let start = policy.instant(p);
        let t = start + exp_time(revealed_rate, rng);
        let end = if p + 1 < n { policy.instant(p + 1) } else { f64::INFINITY };
        if t < end && t <= horizon {
            history.down.push((t, end));
        }
    }
}

/// Per-trial workspace holding the element histories.
struct Trial {
    elements: Vec<ElementHistory>,
    breaks: Vec<f64>,
    to_defeat: usize,
}

impl Trial {
    fn new(architecture: Architecture) -> Self {
        Self {
            elements: vec![ElementHistory::default(); architecture.n_elements() as usize],
            breaks: Vec::new(),
            to_defeat: architecture.failures_to_defeat() as usize,
        }
    }

    fn sample<R: Rng + ?Sized>(&mut self, barrier: &SimulatedBarrier, horizon: f64, rng: &mut R) -> bool {
        for e in &mut self.elements {
            fill_history(e, barrier.failure_rate, &barrier.policy, horizon, rng);
        }
        self.elements.iter().filter(|e| e.ever_down()).count() >= self.to_defeat
    }

    fn barrier_down(&self, t: f64) -> bool {
        self.elements.iter().filter(|e| e.is_down(t)).count() >= self.to_defeat
    }

    /// Measure of `{t in [0, t1] : barrier down}`.
    fn downtime(&mut self, t1: f64) -> f64 {
        // The barrier state is constant between consecutive interval ends;
        // an element may hold overlapping intervals from both failure modes.
        self.breaks.clear();
        self.breaks.push(0.0);
        self.breaks.push(t1);
        for e in &self.elements {
            for &(s, end) in &e.down {
                for x in [s, end] {
                    if x > 0.0 && x < t1 {
                        self.breaks.push(x);
                    }
                }
            }
        }
        self.breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite break points"));
        let mut total = 0.0;
        for w in self.breaks.windows(2) {
            if w[1] > w[0] && self.barrier_down(0.5 * (w[0] + w[1])) {
                total += w[1] - w[0];
            }
        }
        total
    }
}

/// Mergeable PFD tallies.
#[derive(Debug, Clone, PartialEq)]
pub struct PfdAccumulator {
    pub trials: u64,
    /// Trials with the barrier down at each grid time.
    pub down_counts: Vec<u64>,
    /// Sum and sum of squares of the per-trial downtime fraction.
    pub downtime_sum: f64,
    pub downtime_sq_sum: f64,
}

impl PfdAccumulator {
    pub fn new(grid_points: usize) -> Self {
        Self {
            trials: 0,
            down_counts: vec![0; grid_points],
            downtime_sum: 0.0,
            downtime_sq_sum: 0.0,
        }
    }

    pub fn merge(mut self, other: &Self) -> Self {
        self.trials += other.trials;
        for (a, b) in self.down_counts.iter_mut().zip(&other.down_counts) {
            *a += b;
        }
        self.downtime_sum += other.downtime_sum;
        self.downtime_sq_sum += other.downtime_sq_sum;
        self
    }

    pub fn finish(&self, t1: f64) -> PfdEstimate {
        let g = self.down_counts.len();
        let n = self.trials as f64;
        let mean = self.downtime_sum / n;
        let variance = if self.trials > 1 {
            ((self.downtime_sq_sum - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        PfdEstimate {
            times: grid_times(t1, g),
            curve: self.down_counts.iter().map(|&c| Estimate::bernoulli(c, self.trials)).collect(),
            average: Estimate {
                mean,
                std_error: (variance / n).sqrt(),
                trials: self.trials,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfdEstimate {
    pub times: Vec<f64>,
    pub curve: Vec<Estimate>,
    pub average: Estimate,
}

/// `t_i = (i+1) T1 / g`; the last point is `T1`, where the barrier is seen
/// just before the full test.
pub fn grid_times(t1: f64, grid_points: usize) -> Vec<f64> {
    (0..grid_points)
        .map(|i| (i + 1) as f64 * t1 / grid_points as f64)
        .collect()
}

fn batch_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs batches `batches` of the PFD simulation.
pub fn accumulate_pfd(
    barrier: &SimulatedBarrier,
    config: &SimulationConfig,
    batches: std::ops::Range<u64>,
) -> Result<PfdAccumulator> {
    config.validate()?;
    let t1 = barrier.policy.full_test_period();
    let times = grid_times(t1, config.grid_points);
    let partials: Vec<PfdAccumulator> = batches
        .into_par_iter()
        .map(|b| {
            let mut acc = PfdAccumulator::new(config.grid_points);
            let mut rng = batch_rng(config.seed, b);
            let mut trial = Trial::new(barrier.architecture);
            let len = config.batch_len(b);
            acc.trials = len;
            for _ in 0..len {
                if !trial.sample(barrier, t1, &mut rng) {
                    continue;
                }
                for (count, &t) in acc.down_counts.iter_mut().zip(&times) {
                    if trial.barrier_down(t) {
                        *count += 1;
                    }
                }
                let fraction = trial.downtime(t1) / t1;
                acc.downtime_sum += fraction;
                acc.downtime_sq_sum += fraction * fraction;
            }
            acc
        })
        .collect();
    Ok(partials
        .iter()
        .fold(PfdAccumulator::new(config.grid_points), |acc, p| acc.merge(p)))
}

/// PFD(t) at the grid times (fraction of trials with fewer than `M`
/// elements up) and average PFD (mean per-trial downtime fraction).
pub fn estimate_pfd(barrier: &SimulatedBarrier, config: &SimulationConfig) -> Result<PfdEstimate> {
    let acc = accumulate_pfd(barrier, config, 0..config.batches())?;
    Ok(acc.finish(barrier.policy.full_test_period()))
}

/// Boundaries of the window-start strata: `grid_points` equal pieces of
/// `[0, T1]`, further split one hour before and at every effective partial
/// test and at `T1 - 1 h`, so that windows straddling a test never share a
/// stratum with ordinary windows.
pub fn pfh_strata(barrier: &SimulatedBarrier, grid_points: usize) -> Vec<f64> {
    let policy = &barrier.policy;
    let t1 = policy.full_test_period();
    let mut interior: Vec<f64> = (1..grid_points).map(|i| i as f64 * t1 / grid_points as f64).collect();
    if policy.has_effective_partial_tests() {
        for p in policy.partial_test_instants() {
            interior.push(p - 1.0);
            interior.push(p);
        }
    }
    interior.push(t1 - 1.0);
    crate::quadrature::knots(0.0, t1, interior)
}

/// Mergeable PFH tallies per stratum: with `x` = barrier up at the window
/// start and `y` = up one hour later, `n_x = Σx`, `n_y = Σy`, `n_xy = Σxy`.
#[derive(Debug, Clone, PartialEq)]
pub struct PfhAccumulator {
    pub samples: u64,
    pub up_start: Vec<u64>,
    pub up_end: Vec<u64>,
    pub up_both: Vec<u64>,
}

impl PfhAccumulator {
    pub fn new(strata: usize) -> Self {
        Self {
            samples: 0,
            up_start: vec![0; strata],
            up_end: vec![0; strata],
            up_both: vec![0; strata],
        }
    }

    pub fn merge(mut self, other: &Self) -> Self {
        self.samples += other.samples;
        for (a, b) in [
            (&mut self.up_start, &other.up_start),
            (&mut self.up_end, &other.up_end),
            (&mut self.up_both, &other.up_both),
        ] {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self
    }

    /// Per stratum `max(0, 1 - n_y / n_x)`, weighted by stratum width; the
    /// standard error uses the linearized ratio variance.
    pub fn finish(&self, boundaries: &[f64]) -> Result<Estimate> {
        let strata = self.up_start.len();
        debug_assert_eq!(boundaries.len(), strata + 1);
        let total = boundaries[strata] - boundaries[0];
        let mut mean = 0.0;
        let mut variance = 0.0;
        for j in 0..strata {
            let (nx, ny, nxy) = (self.up_start[j], self.up_end[j], self.up_both[j]);
            if nx < MIN_CONDITIONING_EVENTS {
                return Err(Error::InsufficientConditioning {
                    stratum: j,
                    window_start: boundaries[j],
                    up_events: nx,
                    samples: self.samples,
                });
            }
            let w = (boundaries[j + 1] - boundaries[j]) / total;
            let (nx, ny, nxy) = (nx as f64, ny as f64, nxy as f64);
            let ratio = ny / nx;
            let residual = (ny - 2.0 * ratio * nxy + ratio * ratio * nx).max(0.0);
            mean += w * (1.0 - ratio).max(0.0);
            variance += w * w * residual / (nx * nx);
        }
        Ok(Estimate {
            mean,
            std_error: variance.sqrt(),
            trials: self.samples * strata as u64,
        })
    }
}

pub fn accumulate_pfh(
    barrier: &SimulatedBarrier,
    config: &SimulationConfig,
    batches: std::ops::Range<u64>,
) -> Result<PfhAccumulator> {
    config.validate()?;
    let t1 = barrier.policy.full_test_period();
    let bounds = pfh_strata(barrier, config.grid_points);
    let strata = bounds.len() - 1;
    let horizon = t1 + 1.0;
    let partials: Vec<PfhAccumulator> = batches
        .into_par_iter()
        .map(|b| {
            let mut acc = PfhAccumulator::new(strata);
            let mut rng = batch_rng(config.seed, PFH_STREAM_BASE | b);
            let mut trial = Trial::new(barrier.architecture);
            let len = config.batch_len(b);
            acc.samples = len;
            let mut all_up = 0u64;
            for _ in 0..len {
                if !trial.sample(barrier, horizon, &mut rng) {
                    all_up += 1;
                    continue;
                }
                for (j, w) in bounds.windows(2).enumerate() {
                    let t = w[0] + rng.random::<f64>() * (w[1] - w[0]);
                    let x = !trial.barrier_down(t);
                    let y = !trial.barrier_down(t + 1.0);
                    acc.up_start[j] += u64::from(x);
                    acc.up_end[j] += u64::from(y);
                    acc.up_both[j] += u64::from(x && y);
                }
            }
            for j in 0..strata {
                acc.up_start[j] += all_up;
                acc.up_end[j] += all_up;
                acc.up_both[j] += all_up;
            }
            acc
        })
        .collect();
    Ok(partials.iter().fold(PfhAccumulator::new(strata), |acc, p| acc.merge(p)))
}

/// Average one-hour conditional unreliability. Each trial draws one window
/// start uniformly inside every stratum of [`pfh_strata`].
pub fn estimate_pfh(barrier: &SimulatedBarrier, config: &SimulationConfig) -> Result<Estimate> {
    let acc = accumulate_pfh(barrier, config, 0..config.batches())?;
    acc.finish(&pfh_strata(barrier, config.grid_points))
}
