//! Lyapunov exponents and spectra of discrete Schrödinger operators whose
//! potentials are read off substitution, Sturmian and periodic sequences.

pub mod cli;
pub mod cocycle;
pub mod error;
pub mod grid;
pub mod output;
pub mod spectrum;
pub mod subshifts;
pub mod words;

pub use error::{Error, Result};
pub use grid::EnergyGrid;
