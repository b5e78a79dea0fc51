//! Walk-on-spheres estimation of harmonic measure on both sides of a
//! generated boundary.

pub mod index;
pub mod measure;
pub mod walk;

pub use index::{Nearest, SpatialIndex};
pub use measure::{
    density_ratio_oscillation, measure_of_f, omega_weighted_normal_oscillation, partition_arcs, Boundary,
    DensityRatio, DensityRatioParams, FMeasure, Oscillation, MIN_BALL_ABSORPTIONS,
};
pub use walk::{half_width, run_walks, walk_rng, wos_absorb, Absorption, Domain, MeasureEstimate, Side, WosConfig};
