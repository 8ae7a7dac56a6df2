//! Chiral-magnetic-effect transport.
//!
//! The axion-electrodynamics current j = (α/4π²)(φ̇B + ∇φ×E) specializes to
//! the CME current (α/4π²)μ₅B for a homogeneous axion. In a Weyl semimetal
//! μ₅ relaxes as
//!
//! ```text
//! μ̇₅ + μ₅/τ − DΔμ₅ = (L²α/4π²) E·B
//! ```
//!
//! which is the U = 0 specialization of the axion equation with a relaxation
//! term added. For a space-independent μ₅ the diffusion term drops; a single
//! Fourier mode of wavenumber q instead adds Dq² to the relaxation rate.

use alloc::format;

use crate::math::{self, cross, dot, Vec3, FOUR_PI_SQ};
use crate::ode::{self, OdeSystem, StepControl};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportParams {
    pub alpha: f64,
    pub l: f64,
    /// Chirality relaxation time.
    pub tau: f64,
    /// Diffusion constant.
    pub diffusion: f64,
}

impl TransportParams {
    pub fn new(alpha: f64, l: f64, tau: f64, diffusion: f64) -> Result<Self> {
        let p = TransportParams { alpha, l, tau, diffusion };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("transport.alpha", format!("must be positive, got {}", self.alpha)));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::invalid("transport.l", format!("must be positive, got {}", self.l)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid("transport.tau", format!("must be positive, got {}", self.tau)));
        }
        if !(self.diffusion >= 0.0 && self.diffusion.is_finite()) {
            return Err(Error::invalid("transport.diffusion", format!("must be non-negative, got {}", self.diffusion)));
        }
        Ok(())
    }

    /// α = 2π·(e²/h).
    pub fn alpha_from_conductance_quantum(e2_over_h: f64) -> f64 {
        2.0 * math::PI * e2_over_h
    }

    /// L²α/4π², the coefficient converting E·B into a μ₅ source.
    pub fn drive_coefficient(&self) -> f64 {
        self.l * self.l * self.alpha / FOUR_PI_SQ
    }

    /// 1/τ + Dq² for a μ₅ profile ∝ e^{iqx}; q = 0 is the homogeneous case.
    pub fn relaxation_rate(&self, q: f64) -> f64 {
        1.0 / self.tau + self.diffusion * q * q
    }
}

/// j = (α/4π²)(φ̇B + ∇φ×E).
pub fn axion_current(phi_dot: f64, grad_phi: Vec3, e: Vec3, b: Vec3, alpha: f64) -> Vec3 {
    let c = alpha / FOUR_PI_SQ;
    let g = cross(grad_phi, e);
    [
        c * (phi_dot * b[0] + g[0]),
        c * (phi_dot * b[1] + g[1]),
        c * (phi_dot * b[2] + g[2]),
    ]
}

/// ρ = ∇·E = (α/4π²)∇φ·B, the Gauss-law charge of an inhomogeneous axion.
pub fn axion_charge_density(grad_phi: Vec3, b: Vec3, alpha: f64) -> f64 {
    (alpha / FOUR_PI_SQ) * dot(grad_phi, b)
}

/// j = (α/4π²)μ₅B.
pub fn cme_current(mu5: f64, b: Vec3, alpha: f64) -> Vec3 {
    let c = alpha / FOUR_PI_SQ;
    [c * (mu5 * b[0]), c * (mu5 * b[1]), c * (mu5 * b[2])]
}

/// Late-time fixed point μ₅ = τ(L²α/4π²)E·B.
pub fn steady_mu5(p: &TransportParams, edotb: f64) -> f64 {
    p.tau * p.drive_coefficient() * edotb
}

/// Closed-form μ₅(t) for a constant drive `d` (the full source term):
/// μ∞ + (μ₅(0) − μ∞)e^{−rt} with r = 1/τ + Dq² and μ∞ = d/r.
pub fn relax_mu5_constant(p: &TransportParams, drive: f64, mu5_0: f64, t: f64, q: f64) -> f64 {
    let rate = p.relaxation_rate(q);
    let inf = drive / rate;
    inf + (mu5_0 - inf) * math::exp(-rate * t)
}

/// Solves μ̇₅ + μ₅/τ = drive(t) from μ₅(0) = `mu5_0` up to time `t`.
///
/// `drive` is the whole source (L²α/4π²)E·B(t). Integrated numerically at
/// tolerance 1e-13.
pub fn relax_mu5<F>(p: &TransportParams, drive: F, mu5_0: f64, t: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    p.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("must be non-negative, got {t}")));
    }
    struct Relax<'a, F> {
        rate: f64,
        drive: &'a F,
    }
    impl<F: Fn(f64) -> f64> OdeSystem for Relax<'_, F> {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = (self.drive)(t) - self.rate * y[0];
        }
    }
    if t == 0.0 {
        return Ok(mu5_0);
    }
    let sys = Relax { rate: p.relaxation_rate(0.0), drive: &drive };
    let (y, _) = ode::integrate(&sys, 0.0, &[mu5_0], t, &[], &StepControl::with_tol(1e-13), |_, _| {})
        .map_err(|e| Error::StepUnderflow { k: 0.0, t: e.t })?;
    Ok(y[0])
}

/// σ_kℓ = τ(Lα/4π²)² B_k B_ℓ: symmetric, positive semidefinite, rank ≤ 1.
pub fn conductivity_tensor(p: &TransportParams, b: Vec3) -> [[f64; 3]; 3] {
    let c = p.l * p.alpha / FOUR_PI_SQ;
    let pref = p.tau * c * c;
    let mut s = [[0.0; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            s[k][l] = pref * (b[k] * b[l]);
        }
    }
    s
}

/// Ohm's law j = σE.
pub fn ohmic_current(sigma: &[[f64; 3]; 3], e: Vec3) -> Vec3 {
    [dot(sigma[0], e), dot(sigma[1], e), dot(sigma[2], e)]
}

/// Current of the CME with μ₅ at its steady value for the given E and B.
pub fn steady_cme_current(p: &TransportParams, e: Vec3, b: Vec3) -> Vec3 {
    let mu5 = steady_mu5(p, dot(e, b));
    cme_current(mu5, b, p.alpha)
}
