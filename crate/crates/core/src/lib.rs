//! Grover search under localized dephasing noise.
//!
//! The noisy Grover step `E = U ∘ D` (dephasing first, then the Grover
//! unitary) leaves a small space of real operators invariant. This crate
//! iterates the step on that space ([`reduced`]), checks it against an
//! exact `N x N` density-matrix simulation ([`full`]), evaluates the
//! first-order closed forms ([`analytics`]) and verifies the perturbed
//! spectrum ([`spectral`]). [`metrics`] turns success curves into expected
//! oracle-call costs and scaling exponents, and [`walk`] maps a star-graph
//! quantum walk with randomly phase-shifting vertices onto the decoupled
//! noise model.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod analytics;
pub mod error;
pub mod full;
pub mod linalg;
pub mod metrics;
pub mod reduced;
pub mod spectral;
pub mod trace;
pub mod walk;

pub use error::{Error, Result};
pub use reduced::{BasisKind, NoiseKind, NoiseParams, ProblemSpec, ReducedStep, SigmaState};
pub use trace::EvolutionTrace;
