//! Construction and measurement of a snowflake-type planar domain whose
//! boundary carries a dense family of frozen vertical segments.
//!
//! The pipeline runs `Ω₀ → Ω₁ → …`: every boundary chord is replaced by a
//! tree of `4^(M²)` segments ([`snowflake`]), the result is filleted and
//! re-inscribed as an equal-chord polygon ([`refine`]), and the curves are
//! then measured geometrically ([`regularity`]) and probabilistically
//! ([`wos`]). [`io`] holds persistence, reports and the command drivers.

// `!(x > 0.0)` is how NaN gets rejected along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod geometry;
pub mod io;
pub mod refine;
pub mod regularity;
pub mod snowflake;
pub mod wos;

pub use error::{Error, Result};
pub use exec::Exec;
