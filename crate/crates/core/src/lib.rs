//! Information gain and disturbance of the diagonal measurement family
//! `M(d,k,l,λ) = diag(1,…,1, λ,…,λ, 0,…,0)` on a `d`-level system.
//!
//! The crate evaluates, for a single measurement outcome,
//!
//! - the Shannon information gain `I`, the estimation fidelity `G`,
//!   the operation fidelity `F` and the physical reversibility `R`
//!   ([`quantities`]),
//! - their first and second derivatives with respect to `λ²`, including
//!   every endpoint limit ([`derivatives`]),
//! - slopes and curvatures of the resulting curves in the four
//!   information–disturbance planes, their shapes and the boundary sets
//!   ([`tradeoff`]),
//!
//! and ships independent checks of all of the above: Haar-measure Monte
//! Carlo estimators, a state-vector reversal simulation, Richardson finite
//! differences and exact rational identity checks ([`oracle`]).
//!
//! All coefficient arithmetic is exact (big rationals). The alternating sum
//! `J` that appears in `I` is evaluated either exactly through
//! [`jsum::closed_form`] or, close to `λ = 1`, through its Taylor series
//! [`jsum::series`].

pub mod cli;
pub mod combinatorics;
pub mod derivatives;
mod error;
mod exact;
mod expansion;
pub mod jsum;
pub mod oracle;
pub mod quantities;
pub mod tradeoff;
pub mod verify;

pub use combinatorics::{binomial, coeff_a, coeff_c, harmonic, LogRational};

pub use derivatives::{Alpha, DerivativeBundle};
pub use error::Error;
pub use oracle::{McEstimate, PureState};
pub use quantities::{MeasurementSpec, QuantityBundle};
pub use tradeoff::{CurveSample, Plane, ShapeClass, ShapeTag};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Inputs closer than this to `λ = 0` or `λ = 1` are evaluated with the
/// endpoint limit formulas instead of the generic expressions.
pub const ENDPOINT_THRESHOLD: f64 = 1e-12;

/// Largest `k + l` covered by the test suites. Larger orders evaluate fine,
/// they are just not part of the verified range.
pub const SUPPORTED_ORDER_CAP: u32 = 64;
