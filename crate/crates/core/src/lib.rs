//! Fault-tolerant quantum error correction laboratory.

pub mod analysis;
pub mod circuit;
pub mod codes;
pub mod dense;
pub mod error;
pub mod fluxon;
pub mod noise;
pub mod pauli;
pub mod protocols;
pub mod sim;

pub use error::{Error, Result};
pub use pauli::{Clifford, Pauli1, PauliString};
