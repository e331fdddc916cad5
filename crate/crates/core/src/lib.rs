pub mod continuum;
pub mod error;
pub mod exactdist;
pub mod harness;
pub mod lattice;
pub mod rng;
pub mod samplers;
pub mod solitons;
pub mod toda;

pub use error::{Error, Result};
