//! Synthesis and analysis of dynamically corrected gates (DCGs) and Eulerian
//! dynamical decoupling (EDD) for qubits coupled to a quantum bath.

pub mod analysis;
pub mod balance;
pub mod cli;
pub mod drift;
pub mod error;
pub mod group;
pub mod operator;
pub mod schedule;
pub mod spinbath;

pub use error::{Error, Result};
