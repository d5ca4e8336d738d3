//! Geometric and symbolic primitives: conformal maps, words, subshifts,
//! cylinder geometry, and distortion constants.
//!
//! Everything here is immutable after construction and safe to share across
//! worker threads.

mod distortion;
pub mod map;
pub mod schema;
mod separation;
mod subshift;
mod system;
mod word;

pub use distortion::{distortion_constants, DistortionConstants};
pub use map::{ConformalMap, MobiusInvolutionMap, OrthogonalMatrix, Similitude, UserConformalMap};
pub use schema::{ConformalSystemDef, MapDef, RestrictedProductDef, SystemDef};
pub use separation::{check_strong_separation, SeparationReport};
pub use subshift::SubshiftMatrix;
pub use system::IFSSystem;
pub use word::Word;
