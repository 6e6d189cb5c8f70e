//! Exact diagonalization of a three-level ladder (Ξ) atomic ensemble coupled
//! to a single field mode, sector by sector in the conserved excitation
//! number `M = a†a + A22 + 2A33`.

pub mod basis;
#[cfg(feature = "cli")]
pub mod cli;
pub mod criticality;
pub mod error;
pub mod hamiltonian;
mod linalg;
pub mod model;
pub mod observables;
mod par;
pub mod spectra;
pub mod thermo;

pub use basis::{sector_dimension, BasisState, SectorBasis};
pub use error::{Error, Result};
pub use hamiltonian::{build_sector, build_thermo_sector, sector_matrix, SectorMatrix};
pub use model::{Detunings, ModelParams};
pub use spectra::{
    diagonalize, global_ground, sector_ground, GroundStateRecord, MmaxPolicy, SectorSpectrum,
    SectorState,
};
pub use thermo::{thermo_fan, thermo_spectrum, ThermoSpectrumLine};
