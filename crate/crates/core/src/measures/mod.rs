//! Measure oracles: self-similar and Gibbs measures with cylinder masses,
//! sampling, ball-mass brackets, rescaled restrictions, and affine
//! non-concentration profiling.

mod ball;
mod gibbs;
mod markov;
mod nonconc;
mod oracle;
mod potential;
mod prob;
mod restriction;
mod selfsimilar;

pub use ball::{ball_mass_estimate, BallMass};
pub use gibbs::GibbsMeasure;
pub use markov::{perron_eigen, MarkovChain};
pub use nonconc::{
    affine_nonconcentration_profile, fit_power_law, profile_from_samples, NonConcParams,
    NonConcProfile, PowerLawFit,
};
pub use oracle::{depth_for_diameter, sample_points, sample_words, MassInterval, MeasureOracle};
pub use potential::{
    normalize_potential, pressure_estimate, GibbsPotential, NormalizedGibbs, NormalizedPotential,
    PotentialFn,
};
pub use prob::ProbabilityVector;
pub use restriction::RescaledRestriction;
pub use selfsimilar::SelfSimilarMeasure;
