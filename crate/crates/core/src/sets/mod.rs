//! Control regions: periodic thick patterns, equidistributed ball unions,
//! and their Gram matrices against sine bases.

mod equidistributed;
mod region;
mod thick;

pub use equidistributed::EquidistributedSet;
pub use region::{cross_gram, indicator_gram, region_norm, ControlRegion, RegionPiece};
pub use thick::{best_thickness, thickness_check, ThickPattern};
