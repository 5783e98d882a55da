//! SIL bands and demand-mode selection.
//!
//! | SIL | PFD (low demand)  | PFH (high demand) |
//! |-----|-------------------|-------------------|
//! | 4   | `[1e-5, 1e-4)`    | `[1e-9, 1e-8)`    |
//! | 3   | `[1e-4, 1e-3)`    | `[1e-8, 1e-7)`    |
//! | 2   | `[1e-3, 1e-2)`    | `[1e-7, 1e-6)`    |
//! | 1   | `[1e-2, 1e-1)`    | `[1e-6, 1e-5)`    |
//!
//! Values better than the SIL 4 band give [`SilLevel::NoneAbove`]; values
//! at or beyond the SIL 1 ceiling give [`SilLevel::NoneBelow`].

use core::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DemandMode {
    LowDemand,
    HighDemand,
}

impl fmt::Display for DemandMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DemandMode::LowDemand => "low_demand",
            DemandMode::HighDemand => "high_demand",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SilLevel {
    Sil4,
    Sil3,
    Sil2,
    Sil1,
    /// Worse than SIL 1.
    NoneBelow,
    /// Better than SIL 4.
    NoneAbove,
}

impl SilLevel {
    /// Ordering by probability: 0 for `NoneAbove` up to 5 for `NoneBelow`.
    pub fn rank(self) -> u8 {
        match self {
            SilLevel::NoneAbove => 0,
            SilLevel::Sil4 => 1,
            SilLevel::Sil3 => 2,
            SilLevel::Sil2 => 3,
            SilLevel::Sil1 => 4,
            SilLevel::NoneBelow => 5,
        }
    }

    /// `Some(1..=4)` inside a band.
    pub fn number(self) -> Option<u8> {
        match self {
            SilLevel::Sil4 => Some(4),
            SilLevel::Sil3 => Some(3),
            SilLevel::Sil2 => Some(2),
            SilLevel::Sil1 => Some(1),
            SilLevel::NoneBelow | SilLevel::NoneAbove => None,
        }
    }

    pub fn from_number(level: u8) -> Option<Self> {
        match level {
            4 => Some(SilLevel::Sil4),
            3 => Some(SilLevel::Sil3),
            2 => Some(SilLevel::Sil2),
            1 => Some(SilLevel::Sil1),
            _ => None,
        }
    }

    /// True when the probability behind `self` is at most the upper bound
    /// of `target`'s band.
    pub fn meets(self, target: SilLevel) -> bool {
        self.rank() <= target.rank()
    }
}

impl fmt::Display for SilLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SilLevel::Sil4 => "SIL4",
            SilLevel::Sil3 => "SIL3",
            SilLevel::Sil2 => "SIL2",
            SilLevel::Sil1 => "SIL1",
            SilLevel::NoneBelow => "none_below",
            SilLevel::NoneAbove => "none_above",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SilVerdict<S> {
    pub mode: DemandMode,
    pub probability: S,
    pub level: SilLevel,
}

const PFD_BOUNDS: [f64; 5] = [1e-5, 1e-4, 1e-3, 1e-2, 1e-1];
const PFH_BOUNDS: [f64; 5] = [1e-9, 1e-8, 1e-7, 1e-6, 1e-5];
const LEVELS: [SilLevel; 4] = [SilLevel::Sil4, SilLevel::Sil3, SilLevel::Sil2, SilLevel::Sil1];

fn band<S: Scalar>(p: S, bounds: &[f64; 5]) -> Result<SilLevel> {
    if !(p >= S::zero() && p <= S::one()) {
        return Err(Error::InvalidProbability(p.as_f64()));
    }
    // Compare in f64 so the literal bounds are exact for both scalars.
    let p = p.as_f64();
    if p < bounds[0] {
        return Ok(SilLevel::NoneAbove);
    }
    Ok(bounds[1..]
        .iter()
        .zip(LEVELS)
        .find(|(&upper, _)| p < upper)
        .map_or(SilLevel::NoneBelow, |(_, level)| level))
}

pub fn sil_from_pfd<S: Scalar>(pfd: S) -> Result<SilVerdict<S>> {
    Ok(SilVerdict {
        mode: DemandMode::LowDemand,
        probability: pfd,
        level: band(pfd, &PFD_BOUNDS)?,
    })
}

pub fn sil_from_pfh<S: Scalar>(pfh: S) -> Result<SilVerdict<S>> {
    Ok(SilVerdict {
        mode: DemandMode::HighDemand,
        probability: pfh,
        level: band(pfh, &PFH_BOUNDS)?,
    })
}

/// Low demand iff at most one demand per year and at most twice the
/// proof-test frequency (`8760 / T1` tests per year).
pub fn classify_demand_mode<S: Scalar>(demand_rate_per_year: S, full_test_period_hours: S) -> Result<DemandMode> {
    if !(demand_rate_per_year > S::zero() && demand_rate_per_year.is_finite()) {
        return Err(Error::Domain(format!("demand rate must be positive, got {demand_rate_per_year}")));
    }
    if !(full_test_period_hours > S::zero() && full_test_period_hours.is_finite()) {
        return Err(Error::Domain(format!(
            "full-test period must be positive, got {full_test_period_hours}"
        )));
    }
    let test_frequency = S::lit(HOURS_PER_YEAR) / full_test_period_hours;
    if demand_rate_per_year <= S::one() && demand_rate_per_year <= S::lit(2.0) * test_frequency {
        Ok(DemandMode::LowDemand)
    } else {
        Ok(DemandMode::HighDemand)
    }
}
