//! Abelian quantum Hall fluids.
//!
//! - [`HallLattice`] / [`ChargeVector`] / [`hall_fraction`]: the Hall fraction
//!   σ_H·h/e² = qᵀG⁻¹q of an odd integral lattice with Gram matrix G and a
//!   visible dual-lattice charge vector q, in exact rational arithmetic.
//! - [`enumerate_fractions`]: exhaustive desk-scale enumeration.
//! - [`charge_transport`], [`streda_density`], [`bulk_current`], [`hall3d`]:
//!   linear response identities.
//! - [`anomaly`]: the discrete bulk/edge conservation check on a 2D grid.
//!
//! Current normalization is jᵘ = (σ_H/2)εᵘᵛˡF_νλ, so that jᵏ = σ_H εᵏˡE_ℓ and
//! j⁰ = σ_H B hold with unit coefficients.

pub mod anomaly;
mod enumerate;
mod lattice;
mod transport;

pub use anomaly::{anomaly_fields, anomaly_inflow_check, AnomalyFields, AnomalyReport, AnomalySetup, GridSample2D, TestPotential};
pub use enumerate::{enumerate_all, enumerate_fractions, EnumeratedFraction, LatticeCandidate};
pub use lattice::{hall_fraction, ChargeVector, HallFraction, HallLattice, LatticeError};
pub use transport::{bulk_current, charge_transport, hall3d, streda_density, streda_density_f64};
