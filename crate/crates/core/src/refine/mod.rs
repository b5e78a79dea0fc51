//! The `Ωₙ → Ω_{n+1}` step.

pub mod advance;
pub mod assemble;
pub mod chords;
pub mod curve;
pub mod smooth;

pub use advance::*;
pub use assemble::*;
pub use chords::*;
pub use curve::*;
pub use smooth::*;
