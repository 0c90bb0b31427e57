//! Simulation of randomized sensor reallocation on the unit interval and
//! unit square.
//!
//! The library provides:
//!
//! * placement types and verifiable coverage/interference predicates
//!   ([`geometry`]),
//! * deterministic, splittable sampling of random deployments ([`sampling`]),
//! * the reallocation procedures themselves: equidistant anchoring and the
//!   gap-repair sweeps on the line ([`line`]), and the row-decomposition
//!   procedure on the square ([`square`]),
//! * an exact min-cost assignment oracle ([`matching`]),
//! * special functions, adaptive quadrature and Beta-moment bounds used by
//!   the verification suite ([`special`], [`quad`], [`beta`]),
//! * a reproducible Monte Carlo experiment runner with scaling-law fitting
//!   ([`harness`]).
//!
//! All numeric kernels are generic over the scalar type through the [`Real`]
//! trait; `f64` aliases for the common types are exported at the crate root.

use std::fmt;

pub mod beta;
pub mod geometry;
pub mod harness;
pub mod line;
pub mod matching;
pub mod quad;
pub mod sampling;
pub mod special;
pub mod square;

/// Scalar type the numeric kernels are generic over.
///
/// Implemented for `f32` and `f64` via the blanket impl; `of`/`as_f64`
/// bridge to the `f64` constants baked into the algorithms.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + std::iter::Sum<Self>
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 not representable in this scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }

    #[inline]
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize not representable in this scalar type")
    }
}

impl<T> Real for T where
    T: num_traits::Float
        + num_traits::FromPrimitive
        + num_traits::NumAssign
        + std::iter::Sum<T>
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter or input value violates a documented precondition.
    Invalid(String),
    /// A coverage/interference check failed during an experiment run; carries
    /// everything needed to replay the offending trial.
    CiViolation {
        experiment: String,
        n: u64,
        trial: u64,
        master_seed: u64,
        stream_id: u64,
        detail: String,
    },
    /// Filesystem or serialization failure in the harness.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Invalid(msg) => write!(f, "invalid input: {msg}"),
            Error::CiViolation {
                experiment,
                n,
                trial,
                master_seed,
                stream_id,
                detail,
            } => write!(
                f,
                "coverage/interference violation in {experiment} at n={n} trial={trial} \
                 (replay: master_seed={master_seed} stream_id={stream_id}): {detail}"
            ),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

// f64 aliases for the common working types.
pub type Placement1 = geometry::Placement1D<f64>;
pub type Placement2 = geometry::Placement2D<f64>;
pub type Report = geometry::DisplacementReport<f64>;
pub type Params = geometry::CandIParams<f64>;

pub use geometry::{displacement_report, verify_ci_1d, verify_ci_2d};
pub use sampling::SeedSpec;
