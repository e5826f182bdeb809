//! Bore-type initial data: profile construction with periodization, the
//! low/high frequency split, and composition of 2D data over a 1D background.

mod compose;
mod profile;
mod split;

pub use compose::{compose_2d, extend_1d_to_2d, Composed2D};
pub use profile::{make_bore, BoreField, BoreProfile, BufferZone, ProfileKind};
pub use split::{low_high_split, split_bore_state, split_c2, SplitData};
