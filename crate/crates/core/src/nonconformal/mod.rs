//! Restricted-product (carpet-like) IFSs: hypothesis checking, disintegration
//! into random one-dimensional fiber measures, and random transfer-operator
//! compositions.

mod disintegration;
mod random_decay;
mod random_measure;
mod system;

pub use disintegration::{
    disintegration_check, project_alphabet, sample_beta, DisintegrationData, DisintegrationReport,
};
pub use random_decay::{random_norm_decay, RandomDecayRow, RandomDecayTable};
pub use random_measure::RandomFiberMeasure;
pub use system::RestrictedProductIFS;
