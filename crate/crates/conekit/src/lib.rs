//! Cone-metric construction kit.
//!
//! The library builds three families of explicitly computable geometric
//! objects and cross-checks them numerically and in exact arithmetic:
//!
//! * spherical metrics with conical singularities on the Riemann sphere
//!   (closed forms where they exist, a two-chart finite-difference solver
//!   otherwise), together with their unit-circle-bundle lifts to the
//!   three-sphere ([`spherical`], [`lift`]);
//! * flat Kähler cone metrics on complex 2-space whose volume density is a
//!   product of powers of linear forms, and their pullbacks under branched
//!   covers ([`flatcone`]);
//! * quotient metrics of finite complex reflection groups in rank 2, with
//!   exact rational-map and invariant-theory bookkeeping ([`reflection`]).
//!
//! Two purely arithmetic modules close the loop: [`curvesing`] computes
//! singularity exponents of plane curve germs from Newton polygons, and
//! [`energy`] evaluates normalized energies of Kähler–Einstein edge metrics
//! and their bubble-decomposition ledgers in exact rational arithmetic.
//!
//! Everything downstream of a construction is treated as a falsifiable
//! claim: curvature, areas, volumes, holonomies, degrees and energies are
//! recomputed by independent means (finite differences, quadrature, exact
//! polynomial algebra) and compared against predicted values.

pub mod config;
pub mod curvesing;
pub mod energy;
pub mod expr;
pub mod fd;
pub mod flatcone;
pub mod lift;
pub mod poly;
pub mod rational;
pub mod reflection;
pub mod report;
pub mod sample;
pub mod spherical;
pub mod suite;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input data (bad points, angles out of range, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// Structurally valid data that fails an admissibility condition.
    #[error("inadmissible cone data: {0}")]
    Inadmissible(String),
    /// Input outside the supported families of this crate.
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// Text that does not conform to the documented grammar.
    #[error("parse error: {0}")]
    Parse(String),
    /// An iterative solver stopped without reaching its tolerance.
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    /// A numeric evaluation produced an unusable value.
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
