//! Deciding how well linear-optical photon-counting measurements can
//! unambiguously discriminate distinguishable multi-photon states from the
//! ideal indistinguishable state.
//!
//! Photon distinguishability is modelled in first quantisation: each photon
//! carries a controlled "System" degree of freedom (the spatial modes an
//! interferometer acts on) and an uncontrolled "Label" (everything else).
//! Tracing out the Label leaves a System density operator that is block
//! diagonal in the Schur-Weyl basis, one Hermitian block per Young diagram
//! `λ`. An interferometer `U` acts on block `λ` through the irreducible
//! representation `U^λ`, and photon-counting outcomes are projections onto
//! occupation subspaces of that basis.
//!
//! The crate provides
//! - [`combinatorics`]: partitions, Young tableaux, irrep dimensions;
//! - [`schur_weyl`]: construction, verification and caching of the
//!   Schur-Weyl change of basis for `N` photons in `d` modes;
//! - [`optics`]: interferometer construction (Reck meshes, QFTs, layered
//!   networks), permanents and irrep blocks;
//! - [`states`]: reduced System states for the standard distinguishability
//!   families and for arbitrary System-Label Fock arrays;
//! - [`scattering`]: outcome probabilities through the irrep pathway plus an
//!   independent permanent-based oracle;
//! - [`discriminate`]: unambiguous-discrimination success probabilities,
//!   bounds, penalised cost functions and a seeded multi-restart optimizer;
//! - [`tables`]: reference values for the regression suites.

pub(crate) mod bfgs;
pub mod combinatorics;
pub mod discriminate;
mod error;
pub(crate) mod linalg;
pub mod optics;
pub mod scattering;
pub mod schur_weyl;
pub mod states;
pub mod tables;

pub use error::{Error, Result};

/// Complex double, the scalar type used throughout.
pub type C64 = num_complex::Complex<f64>;
