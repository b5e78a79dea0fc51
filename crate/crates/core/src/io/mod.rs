//! Configuration, persistence, SVG, reports and the subcommand drivers.

pub mod commands;
pub mod config;
pub mod fixtures;
pub mod pipeline;
pub mod report;
pub mod snapshot;
pub mod svg;

pub use config::{ReportFormat, RunConfig, WindowSpec};
pub use pipeline::{build, build_with, Build, GenerationRecord};
pub use report::{Check, Record, Report};
