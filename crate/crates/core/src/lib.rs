//! Design and simulation of 2D nonlinear-photonic-crystal sources of
//! beamlike path-entangled photon pairs.
//!
//! * [`dispersion`]: temperature-dependent extraordinary index from Sellmeier configs.
//! * [`lattice`]: poling lattices, reciprocal vectors, motif Fourier coefficients.
//! * [`phasematch`]: quasi-phase-matching periods, emission angles, emission patterns.
//! * [`quantum`]: two-mode Fock states, beam-splitter evolution, fringe visibility budget.

pub mod bessel;
pub mod dispersion;
pub mod error;
pub mod export;
pub mod lattice;
pub mod phasematch;
pub mod quantum;

pub use dispersion::DispersionModel;
pub use error::{Error, Result};
pub use lattice::{MotifShape, NpcLattice, ReciprocalVector, Vec2};
