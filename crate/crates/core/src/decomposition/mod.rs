//! The self-similar proof machinery as executable objects: stopping sets,
//! good words, conditioning classes, Diophantine certificates, separation
//! audits, and multinomial bounds.

mod cutoff;
mod diophantine;
mod goodwords;
mod multinomial;
mod pipeline;
mod separation_audit;

pub use cutoff::{sample_stopping_words, stopping_words, CutoffMember, CutoffSet};
pub use diophantine::{
    convergent_denominators, diophantine_lower_bound, diophantine_lower_bound_pair,
    DiophantineCertificate,
};
pub use goodwords::{
    bad_mass_estimate, bad_mass_exact, classify_good, counts_are_good, decay_gap_value,
    good_word_params, hoeffding_sweep, BadMassEstimate, GoodWordParams, HoeffdingFit,
};
pub use multinomial::{
    multinomial_max, multinomial_max_brute, scaling_sweep, MultinomialMax,
};
pub use pipeline::{average_bound_report, PipelineAudit};
pub use separation_audit::{
    separation_check, ClassBandRow, SeparationAudit, SeparationMode, SeparationViolation,
};
