//! Figures of merit for photodetectors described by POVMs.
//!
//! A photodetector is fully characterized by its POVM: a set of positive
//! Hermitian operators Π_k on the Fock space of the incoming light, one
//! per measurement outcome, summing to the identity. This crate represents
//! such POVMs on a truncated multimode Fock space and computes the
//! standard figures of merit from them: outcome purity and effective
//! dimension, single-photon bandwidth, entropic wavelength/timing
//! resolution, photon-number resolution, mode efficiencies, dark-count
//! rates, and response time / detection rate.
//!
//! The crate is organized along the pipeline:
//!
//! - [`hilbert`]: frequency grid, orthonormal mode functions, truncated
//!   Fock basis, ladder matrices, temporal densities;
//! - [`povm`]: POVM validation, Born rule, purity, effective dimension;
//! - [`classical`]: merits of the classical mode content (bandwidth,
//!   posterior frequency/time distributions, binned entropies, Δω·Δt);
//! - [`quantum`]: merits of the photon statistics (number resolution,
//!   efficiencies, dark counts, response time, detection rate);
//! - [`models`]: built-in POVM generators with closed-form properties;
//! - [`io`]: file formats, merit report assembly and serialization.
//!
//! All types are immutable after construction and all operations are pure,
//! so values can be shared freely across threads.

pub mod classical;
pub mod error;
pub mod hilbert;
pub mod io;
pub mod linalg;
pub mod models;
pub mod povm;
pub mod quantum;
pub mod tolerances;

pub use error::{Error, Result};
