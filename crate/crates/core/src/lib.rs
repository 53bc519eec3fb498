//! Conjugacy invariants of analytic vector fields on the circle and their use
//! in classifying `SL(n, ℝ)`-actions on closed `n`-manifolds and lattice
//! actions glued from tori.

pub mod actions;
pub mod circlefield;
pub mod cli;
pub mod error;
pub mod invariants;
pub mod lattice;
pub mod poly;
pub mod quad;
pub mod series;

pub use error::{Error, Result};
