//! Twisted transfer operators on collocation grids, spectral-gap (norm-decay)
//! measurement, UNI margins, and frequency-band non-concentration.

mod bands;
mod decay;
mod grid;
mod operator;
mod uni;

pub use bands::{band_mass_table, frequency_band_mass, BandMass, BandRoute, BandTable};
pub use decay::{norm_decay, NormDecayFit, NormDecayRow, NormDecayTable};
pub use grid::FunctionGrid;
pub use operator::{apply_transfer, TwistedOperator};
pub use uni::{uni_margin, DirectionMargin, UNIReport, UniVariant};
