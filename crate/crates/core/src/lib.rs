//! Numerical core for abelian Chern-Simons effective theories.
//!
//! Three families of computations live here:
//!
//! - magnetic-mode evolution in axion electrodynamics on an expanding
//!   background ([`background`], [`dispersion`], [`evolve`], [`spectra`]),
//! - chiral-magnetic-effect transport formulas ([`cme`]),
//! - exact lattice calculus of abelian quantum Hall fluids and the discrete
//!   bulk/edge anomaly-inflow check ([`qhall`]).
//!
//! The crate is `no_std` and only needs `alloc`. All transcendental functions
//! go through `libm`, so results are bit-identical regardless of which
//! platform math library the final binary links against.
//!
//! Units are natural (c = ħ = 1). Conventions fixed crate-wide:
//!
//! - ε¹² = +1, ε⁰¹² = +1;
//! - the effective chirality is μ̃₅ = (α/4π²)·μ₅ (see [`evolve::effective_mu5`]);
//! - the "+" helicity is the one destabilized when μ̃₅ > 0.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod background;
pub mod cme;
pub mod dispersion;
mod error;
pub mod evolve;
pub mod math;
pub mod ode;
pub mod qhall;
pub mod spectra;

pub use error::{Error, Result};
