//! Exact-diagonalization simulator for information scrambling in thermal
//! spin-1/2 chains with a Dzyaloshinskii-Moriya interaction.
//!
//! The thermal state of a DM Heisenberg chain is probed with a
//! fidelity-based out-of-time-order correlator `F(t)`; sweeps over the DM
//! strength and temperature compare how fast `F` decays.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod hamiltonian;
pub mod linalg;
pub mod matrix;
pub mod operators;
pub mod oracle;
pub mod otoc;
pub mod thermal;

pub use error::{Error, Result};
pub use experiment::{SweepResult, SweepSpec, SweptParameter};
pub use hamiltonian::{ChainConfig, EvolutionModel};
pub use matrix::ComplexMatrix;
pub use otoc::{OtocSeries, TimeGrid};
pub use thermal::DensityMatrix;
