//! Sequence-space vectors, the canonical biorthogonal system and weights.

mod biorth;
mod sparse;
mod weights;

pub use biorth::BiorthSystem;
pub use sparse::SparseVec;
pub use weights::{WeightKind, WeightSeq};
