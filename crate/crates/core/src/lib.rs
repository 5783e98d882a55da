//! Probability of failure on demand (PFD) and per hour (PFH) for MooN
//! safety barriers under full and partial proof tests, SIL classification,
//! and a Monte Carlo oracle for checking the analytic results.
//!
//! The analytic evaluators are generic over [`Scalar`] (`f32` or `f64`);
//! the aliases at the crate root fix the scalar to one of them.
//!
//! ```
//! use safebarrier::{Architecture, BarrierSpecF64, ExactModelF64, TestPolicyF64};
//!
//! let spec = BarrierSpecF64::new(
//!     Architecture::new(2, 3)?,
//!     1e-5,
//!     TestPolicyF64::full_only(720.0)?,
//! )?;
//! let avg = ExactModelF64::new(spec).pfd_average().value();
//! assert!((avg - 5.1376e-5).abs() < 1e-9);
//! # Ok::<(), safebarrier::Error>(())
//! ```

pub mod approx;
pub mod coefficients;
pub mod error;
pub mod exact;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod sil;

pub use approx::{Approximate, PfhFromPfd, ValidityReport, APPROXIMATION_THRESHOLD};
pub use coefficients::{binomial, coeff_s, coeff_t, coeff_v};
pub use error::{Error, Result};
pub use exact::{CurvePoint, ExactModel};
pub use model::{Architecture, BarrierSpec, Evaluation, Limit, Method, TestPolicy, Warning, MAX_ELEMENTS};
pub use oracle::{Estimate, PfdEstimate, SimulatedBarrier, SimulationConfig};
pub use scalar::Scalar;
pub use sil::{DemandMode, SilLevel, SilVerdict};

pub type BarrierSpecF64 = BarrierSpec<f64>;
pub type BarrierSpecF32 = BarrierSpec<f32>;
pub type TestPolicyF64 = TestPolicy<f64>;
pub type TestPolicyF32 = TestPolicy<f32>;
pub type EvaluationF64 = Evaluation<f64>;
pub type EvaluationF32 = Evaluation<f32>;
pub type ExactModelF64 = ExactModel<f64>;
pub type ExactModelF32 = ExactModel<f32>;
pub type CurvePointF64 = CurvePoint<f64>;
pub type ApproximateF64 = Approximate<f64>;
pub type SilVerdictF64 = SilVerdict<f64>;
