use alloc::vec::Vec;

use num_rational::BigRational;

use super::lattice::HallFraction;
use crate::math::{cross, dot, Vec3};
use crate::{Error, Result};

/// ΔQ = σ_H·ΔΦ, in units of e for ΔΦ in units of h/e.
pub fn charge_transport(sigma: &HallFraction, d_phi: &BigRational) -> BigRational {
    sigma.value() * d_phi
}

/// Δj⁰ = σ_H·ΔB.
pub fn streda_density(sigma: &HallFraction, d_b: &BigRational) -> BigRational {
    sigma.value() * d_b
}

pub fn streda_density_f64(sigma: f64, d_b: f64) -> f64 {
    sigma * d_b
}

/// jᵏ = σ_H εᵏˡE_ℓ at every sample: (σE₂, −σE₁).
pub fn bulk_current(sigma: &[f64], e: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
    if sigma.len() != e.len() {
        return Err(Error::DimensionMismatch { expected: sigma.len(), got: e.len() });
    }
    Ok(sigma.iter().zip(e).map(|(&s, e)| [s * e[1], -(s * e[0])]).collect())
}

/// Halperin's 3D response to a crystalline axion φ = 2πK·x:
/// ρ = (e²/h)K·B, j = (e²/h)K×E.
pub fn hall3d(k: [i64; 3], b: Vec3, e: Vec3, e2_over_h: f64) -> (f64, Vec3) {
    let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
    let j = cross(kf, e);
    (e2_over_h * dot(kf, b), [e2_over_h * j[0], e2_over_h * j[1], e2_over_h * j[2]])
}
