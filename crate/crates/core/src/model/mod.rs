//! In-memory reactor parts: cores, assemblies, rods, material blocks and
//! rings, each able to carry a [`DataProvider`] of state-point data.
//!
//! Reactors are assembled through a [`ReactorBuilder`] and become immutable
//! once frozen. Rod and assembly definitions are stored once and referenced
//! by index from the lattice grids.

mod assembly;
mod grid;
mod labels;
mod parts;
mod provider;
mod reactor;
mod view;

pub use assembly::{AssemblyDef, AssemblyType};
pub use grid::Grid;
pub use labels::{make_default_labels, GridLabels, MAX_DEFAULT_LABELS};
pub use parts::{ring_at, Material, MaterialBlock, Phase, Ring, RodDef, RodKind};
pub use provider::{DataEntry, DataProvider, TimeBucket};
pub use reactor::{Lattice, Reactor, ReactorBuilder, ReactorType};
pub use view::{AssemblyView, AxialPoint};

pub(crate) use view::{lattice_point, pin_center};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("type error: {0}")]
    TypeError(String),
    #[error("not found: {0}")]
    NotFound(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
