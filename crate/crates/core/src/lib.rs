//! Numerical laboratory for Fourier decay of dynamically defined measures.
//!
//! The crate builds measures from iterated function systems (self-similar,
//! conformal Gibbs, restricted-product non-conformal), evaluates their Fourier
//! transforms with controlled error, and turns the quantitative steps of the
//! averaging / flattening / separation pipeline into executable audits:
//!
//! * [`ifs`] — conformal maps, symbolic words, subshifts, cylinder geometry
//! * [`measures`] — measure oracles: cylinder mass, sampling, ball mass,
//!   affine non-concentration profiling
//! * [`fourier`] — transform evaluators, decay profiles, exceptional sets
//! * [`decomposition`] — stopping sets, good words, Diophantine certificates,
//!   separation audits, multinomial bounds
//! * [`transfer`] — twisted transfer operators, spectral-gap measurement, UNI
//! * [`nonconformal`] — carpet-like restricted products, disintegration,
//!   random transfer operators
//! * [`equidist`] — Weyl sums, `r_N` estimates, normality testing

pub mod decomposition;
pub mod equidist;
mod error;
pub mod fourier;
mod geom;
pub mod ifs;
pub mod measures;
pub mod nonconformal;
pub mod transfer;

pub mod bundled;

pub use error::CoreError;
pub use geom::{Interval, IntervalBox};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, CoreError>;
