//! Fourier-transform evaluation with controlled error, decay profiling, and
//! exceptional-set (flattening) counting.

mod evaluator;
mod exceptional;
mod fit;
mod profile;

pub use evaluator::{
    cylinder_expansion_eval, Evaluate, EvaluatorSpec, FeCylinder, FeMarkov, FeSelfSimilar,
    FourierValue, McEvaluator, Measure, ProductFormula, DEFAULT_STATE_BUDGET, DEFAULT_WORD_BUDGET,
};
pub use exceptional::{
    exceptional_set_count, exceptional_set_sweep, ExceptionalRow, ExceptionalSetReport,
};
pub use fit::{fit_decay_exponent, fit_loglog, DecayFit, FitModel};
pub use profile::{decay_profile, BandStats, DecayProfile};
