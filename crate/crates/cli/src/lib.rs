//! Experiment runner over the path-transform library: configuration,
//! the named experiment catalog, and CSV/JSON artifact emission.

pub mod config;
pub mod experiments;
pub mod plot;
pub mod table;
