//! Reactor-layout storage, comparison and visualization.
//!
//! * [`model`]: reactor parts (cores, assemblies, rods, material blocks,
//!   rings) and their state-point data providers.
//! * [`nrdf`]: the NRDF self-describing binary container and the mapping of
//!   reactors onto it.
//! * [`analysis`]: pluggable analysis tools, including pin-power percentage
//!   differences and k-means clustering.
//! * [`render`]: deterministic SVG views of cores, assemblies, rods and plots.
//! * [`samples`]: synthetic reactors for demos, benchmarks and tests.
//! * [`ingest`]: CSV import onto an existing reactor layout.

pub mod analysis;
pub mod ingest;
pub mod model;
pub mod nrdf;
pub mod render;
pub mod samples;
