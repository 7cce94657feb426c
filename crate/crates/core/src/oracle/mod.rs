//! Brute-force searches, coloring sweeps and finite-character diagnostics.

pub mod search;
pub mod sweep;
pub mod width;

pub use search::{check_hit, search_cofinal_homogeneous, HitCheck, HomogeneousHit};
pub use sweep::{sweep_colorings, Interior, OutcomeCount, SweepKnobs, SweepMode, SweepReport};
pub use width::{char_width, GeneratedPoset, Generator, LeveledPoset, WidthReport};
