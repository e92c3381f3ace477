//! Deterministic SVG views.
//!
//! Every function here is pure: equal inputs give byte-identical output.
//! Numbers are written with at most three decimals. Geometry is emitted in
//! model units (cm) inside a `viewBox`, so scaling a pitch scales every
//! coordinate.

mod assembly;
mod color;
mod core_map;
mod plot;
mod rod;
mod svg;

pub use assembly::{color_scale, level_values, render_assembly, AssemblyViewKind, AssemblyViewSpec, Window};
pub use color::{color_for, ColorScale, Rgb, Scope, MISSING_COLOR};
pub use core_map::{assembly_color, render_core};
pub use plot::{render_plot, PlotSeries};
pub use rod::{material_color, render_rod};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not found: {0}")]
    NotFound(String),
}

pub type Result<T, E = RenderError> = std::result::Result<T, E>;
