//! Field-dynamics samplers for the ferromagnetic Ising and random-cluster
//! models, with brute-force oracles and coupling constructions that make every
//! component checkable on small instances.

pub mod coupling;
pub mod error;
pub mod exact;
pub mod field;
pub mod gen;
pub mod glauber;
pub mod io;
pub mod model;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
