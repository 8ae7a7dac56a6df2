//! Adiabatic dispersion of helical magnetic modes in a chirally imbalanced,
//! expanding medium.
//!
//! A helical mode b±(t) ∝ e^{−iωt} of the induction equation obeys
//!
//! ```text
//! ω² + 3iHω − (k² + (3/2)Ḣ + (9/4)H² ∓ μ̃₅k) = 0
//! ω = −(3/2)iH ± √(k² + (3/2)Ḣ ∓ μ̃₅k)
//! ```
//!
//! where the upper sign belongs to the "+" helicity. `Im ω` is the
//! instantaneous e-folding rate of that branch.

use num_complex::Complex64;

use crate::math;
use crate::{Error, Result};

/// Coefficients of the mode equation frozen at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiralParams {
    /// μ̃₅ = (α/4π²)·μ₅, the coefficient of the k-linear term.
    pub mu5_eff: f64,
    pub hubble: f64,
    pub hubble_dot: f64,
}

impl ChiralParams {
    pub fn new(mu5_eff: f64, hubble: f64, hubble_dot: f64) -> Self {
        ChiralParams { mu5_eff, hubble, hubble_dot }
    }

    /// K = 9H² + 6Ḣ.
    pub fn shell_offset(&self) -> f64 {
        9.0 * self.hubble * self.hubble + 6.0 * self.hubble_dot
    }

    /// Radicands k² + (3/2)Ḣ ∓ μ̃₅k for the (+, −) helicities.
    fn radicands(&self, k: f64) -> (f64, f64) {
        let base = k * k + 1.5 * self.hubble_dot;
        let shift = self.mu5_eff * k;
        (base - shift, base + shift)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub fn sign(self) -> f64 {
        match self {
            Helicity::Plus => 1.0,
            Helicity::Minus => -1.0,
        }
    }
}

/// The four frequencies, indexed by (helicity, root). Root "+" takes the
/// principal square root with a plus sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionBranches {
    pub plus_plus: Complex64,
    pub plus_minus: Complex64,
    pub minus_plus: Complex64,
    pub minus_minus: Complex64,
}

impl DispersionBranches {
    /// Branches in the fixed order (+,+), (+,−), (−,+), (−,−).
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.plus_plus, self.plus_minus, self.minus_plus, self.minus_minus]
    }

    pub fn helicity(&self, h: Helicity) -> [Complex64; 2] {
        match h {
            Helicity::Plus => [self.plus_plus, self.plus_minus],
            Helicity::Minus => [self.minus_plus, self.minus_minus],
        }
    }

    /// Same branch set with the helicity labels exchanged.
    pub fn helicity_swapped(&self) -> Self {
        DispersionBranches {
            plus_plus: self.minus_plus,
            plus_minus: self.minus_minus,
            minus_plus: self.plus_plus,
            minus_minus: self.plus_minus,
        }
    }
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveWavenumber(k))
    }
}

pub fn omega_branches(k: f64, p: &ChiralParams) -> Result<DispersionBranches> {
    check_k(k)?;
    let damping = Complex64::new(0.0, -1.5 * p.hubble);
    let (r_plus, r_minus) = p.radicands(k);
    let s_plus = math::csqrt(Complex64::new(r_plus, 0.0));
    let s_minus = math::csqrt(Complex64::new(r_minus, 0.0));
    Ok(DispersionBranches {
        plus_plus: damping + s_plus,
        plus_minus: damping - s_plus,
        minus_plus: damping + s_minus,
        minus_minus: damping - s_minus,
    })
}

/// Residual of the characteristic quadratic for a candidate frequency.
pub fn quadratic_residual(omega: Complex64, k: f64, helicity: Helicity, p: &ChiralParams) -> f64 {
    let (r_plus, r_minus) = p.radicands(k);
    let r = match helicity {
        Helicity::Plus => r_plus,
        Helicity::Minus => r_minus,
    };
    let c = r + 2.25 * p.hubble * p.hubble;
    let i3h = Complex64::new(0.0, 3.0 * p.hubble);
    let r = omega * omega + i3h * omega - c;
    math::hypot(r.re, r.im)
}

/// Largest imaginary part over the four branches; positive means growth.
pub fn growth_rate(k: f64, p: &ChiralParams) -> Result<f64> {
    let b = omega_branches(k, p)?;
    Ok(b.as_array().iter().map(|w| w.im).fold(f64::NEG_INFINITY, f64::max))
}

/// Band of wavenumbers with exponential growth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstabilityShell {
    pub empty: bool,
    pub k_min: f64,
    pub k_max: f64,
    /// K = 9H² + 6Ḣ.
    pub offset: f64,
}

impl InstabilityShell {
    pub fn contains(&self, k: f64) -> bool {
        !self.empty && k > self.k_min && k < self.k_max
    }
}

/// Closed-form shell μ̃ − √(μ̃² − K) < 2k < μ̃ + √(μ̃² − K) with μ̃ = |μ̃₅|.
///
/// When K < 0 the lower edge is negative and is clamped to 0. Growth inside
/// and decay outside assume H ≥ 0; a contracting background (H < 0) makes
/// every mode grow.
pub fn instability_shell(p: &ChiralParams) -> InstabilityShell {
    let offset = p.shell_offset();
    let mu = math::abs(p.mu5_eff);
    let disc = mu * mu - offset;
    if !(disc > 0.0) {
        return InstabilityShell { empty: true, k_min: 0.0, k_max: 0.0, offset };
    }
    let root = math::sqrt(disc);
    InstabilityShell {
        empty: false,
        k_min: (0.5 * (mu - root)).max(0.0),
        k_max: 0.5 * (mu + root),
        offset,
    }
}

/// Fastest-growing wavenumber k* = μ̃/2 and its rate
/// γ* = √(μ̃²/4 − (3/2)Ḣ) − (3/2)H.
pub fn max_growth(p: &ChiralParams) -> Result<(f64, f64)> {
    let shell = instability_shell(p);
    if shell.empty {
        let mu = p.mu5_eff;
        return Err(Error::NoInstability { mu5_sq: mu * mu, k: shell.offset });
    }
    let mu = math::abs(p.mu5_eff);
    let k_star = 0.5 * mu;
    let gamma = math::sqrt(0.25 * mu * mu - 1.5 * p.hubble_dot) - 1.5 * p.hubble;
    Ok((k_star, gamma))
}

/// Adiabaticity diagnostic |μ̇₅ / μ₅²|; small values justify the frozen
/// coefficient picture. Infinite when μ₅ = 0 and μ̇₅ ≠ 0.
pub fn adiabaticity_ratio(mu5: f64, mu5_dot: f64) -> f64 {
    if mu5_dot == 0.0 {
        0.0
    } else {
        math::abs(mu5_dot / (mu5 * mu5))
    }
}
