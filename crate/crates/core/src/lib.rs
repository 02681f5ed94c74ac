//! Simulation and exact analysis of the random walk on unitriangular
//! matrices over `Z_q` and of East-type kinetically constrained models,
//! with a Monte Carlo certified upper bound on the walk's mixing time.

pub mod certify;
pub mod east;
pub mod error;
pub mod exact;
pub mod gfq;
pub mod harness;
pub mod path;
pub mod rng;
pub mod walk;

pub use error::{Error, Result};
