//! Vervaat transforms of lattice walks and Brownian-type paths.
//!
//! The crate is organized around four layers:
//!
//! * exact discrete combinatorics on simple walks ([`lattice`]),
//! * seeded path samplers for Brownian motion, bridges, Bessel(3)
//!   processes and their bridges, excursions, first-passage bridges and
//!   meanders ([`sampler`]), together with continuous-path transforms
//!   ([`transform`]),
//! * closed-form densities, kernels and moment identities ([`laws`]),
//!   the generative path decompositions they govern ([`decomp`]), and
//!   semimartingale drift functionals ([`drift`]),
//! * supporting numerics: adaptive quadrature ([`quad`]), special
//!   functions ([`special`]), convex minorants ([`hull`]) and the
//!   statistical test kit ([`stats`]).
//!
//! Everything that consumes randomness takes an explicit [`rng::RngStream`],
//! so identical seeds reproduce identical output bit for bit.

pub mod decomp;
pub mod drift;
pub mod error;
pub mod grid;
pub mod hull;
pub mod lattice;
pub mod laws;
pub mod quad;
pub mod rng;
pub mod sampler;
pub mod special;
pub mod stats;
pub mod transform;

pub use error::{Error, Result};
pub use grid::GridPath;
pub use rng::RngStream;
pub use stats::TestReport;
