//! The replacement operator, the coding tree with freezing, and the exact
//! probabilistic oracles for the rotation-count walk.

pub mod gamma;
pub mod mass;
pub mod oracle;
pub mod replace;

pub use gamma::{
    children, generate_gamma, generate_gamma_windowed, generate_gamma_with, horizontal_source, max_leaf_distance,
    subarc_max_ratio, vertical_mass_ratio, Coding, GammaCurve, GammaPiece, GeneratorParams, SegmentNode,
    DEFAULT_LEAF_BUDGET,
};
pub use mass::{vertical_mass_exact, vertical_mass_sampled, MassEstimate, MassSummary};
pub use oracle::{clt_tail_exact, freeze_hit_exact, rational_to_f64};
pub use replace::{breakpoints, child_factor, replace_segment, MAX_ALPHA};
