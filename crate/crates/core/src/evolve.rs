//! Time evolution of helical magnetic modes under the induction equation
//!
//! ```text
//! B̈ − ΔB + 3H Ḃ + [(3/2)Ḣ + (3H/2)²] B − (α/4π²) φ̇ ∇×B = 0
//! ```
//!
//! On helicity eigenmodes the curl acts as ±k, so every Fourier mode reduces
//! to a pair of decoupled second-order ODEs
//!
//! ```text
//! b̈± = −3H ḃ± − [k² + (3/2)Ḣ + (9/4)H²] b± ± μ̃₅ k b±
//! ```
//!
//! with μ̃₅ = (α/4π²)·μ₅. The wavenumber k is held fixed in time and the
//! Laplacian carries no a⁻² factor: the equation is integrated as written,
//! without choosing between comoving and physical coordinates.
//!
//! Two drivers are provided: [`integrate_modes`] with a prescribed μ₅(t),
//! where every mode is integrated independently, and [`integrate_coupled`],
//! where the homogeneous axion obeys
//!
//! ```text
//! φ̈ + 3Hφ̇ = L² [(α/4π²)⟨E·B⟩ − U′(φ)]
//! ```
//!
//! and all modes share one adaptive step.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::background::{Background, BackgroundState};
use crate::math::{self, pairwise_sum, FOUR_PI_SQ};
use crate::ode::{self, OdeError, OdeFailure, OdeSystem, StepControl};
use crate::spectra;
use crate::{Error, Result};

/// μ̃₅ = (α/4π²)·μ₅. With α = 4π² this is the identity.
#[inline]
pub fn effective_mu5(alpha: f64, mu5: f64) -> f64 {
    (alpha / FOUR_PI_SQ) * mu5
}

/// One Fourier shell of the magnetic field in the helicity basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicalMode {
    pub k: f64,
    pub b_plus: Complex64,
    pub b_minus: Complex64,
    pub v_plus: Complex64,
    pub v_minus: Complex64,
    /// k-space measure of this mode's bin.
    pub weight: f64,
}

const MODE_DIM: usize = 8;

impl HelicalMode {
    pub fn new(k: f64, b_plus: Complex64, b_minus: Complex64, weight: f64) -> Result<Self> {
        let m = HelicalMode { k, b_plus, b_minus, v_plus: Complex64::new(0.0, 0.0), v_minus: Complex64::new(0.0, 0.0), weight };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::NonPositiveWavenumber(self.k));
        }
        if !(self.weight >= 0.0 && self.weight.is_finite()) {
            return Err(Error::invalid("mode.weight", format!("must be non-negative, got {}", self.weight)));
        }
        Ok(())
    }

    /// The mirror image: + and − data exchanged.
    pub fn helicity_swapped(&self) -> Self {
        HelicalMode { b_plus: self.b_minus, b_minus: self.b_plus, v_plus: self.v_minus, v_minus: self.v_plus, ..*self }
    }

    /// |v±|² + (k² ∓ μ̃₅k)|b±|², conserved when H = 0 and μ̃₅ is constant.
    pub fn quadratic_invariants(&self, mu5_eff: f64) -> (f64, f64) {
        let k2 = self.k * self.k;
        let s = mu5_eff * self.k;
        (
            self.v_plus.norm_sqr() + (k2 - s) * self.b_plus.norm_sqr(),
            self.v_minus.norm_sqr() + (k2 + s) * self.b_minus.norm_sqr(),
        )
    }

    fn write_state(&self, y: &mut [f64]) {
        y[0] = self.b_plus.re;
        y[1] = self.b_plus.im;
        y[2] = self.b_minus.re;
        y[3] = self.b_minus.im;
        y[4] = self.v_plus.re;
        y[5] = self.v_plus.im;
        y[6] = self.v_minus.re;
        y[7] = self.v_minus.im;
    }

    fn with_state(&self, y: &[f64]) -> Self {
        HelicalMode {
            b_plus: Complex64::new(y[0], y[1]),
            b_minus: Complex64::new(y[2], y[3]),
            v_plus: Complex64::new(y[4], y[5]),
            v_minus: Complex64::new(y[6], y[7]),
            ..*self
        }
    }
}

/// Time derivative of a [`HelicalMode`]'s dynamical data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDerivative {
    pub b_plus: Complex64,
    pub b_minus: Complex64,
    pub v_plus: Complex64,
    pub v_minus: Complex64,
}

/// Right-hand side of the helical mode equations at time `t`.
pub fn mode_rhs(m: &HelicalMode, t: f64, bg: &Background, mu5_eff: f64) -> Result<ModeDerivative> {
    m.validate()?;
    let st = bg.eval(t)?;
    let mut y = [0.0; MODE_DIM];
    let mut dy = [0.0; MODE_DIM];
    m.write_state(&mut y);
    mode_rhs_raw(m.k, &st, mu5_eff, 0.0, &y, &mut dy);
    Ok(ModeDerivative {
        b_plus: Complex64::new(dy[0], dy[1]),
        b_minus: Complex64::new(dy[2], dy[3]),
        v_plus: Complex64::new(dy[4], dy[5]),
        v_minus: Complex64::new(dy[6], dy[7]),
    })
}

/// Flat-state kernel shared by all drivers. `damping` is the experimental
/// uniform Ohmic term −σ ḃ.
#[inline]
fn mode_rhs_raw(k: f64, st: &BackgroundState, mu5_eff: f64, damping: f64, y: &[f64], dy: &mut [f64]) {
    let h = st.hubble;
    let mass = k * k + 1.5 * st.hubble_dot + 2.25 * h * h;
    let shift = mu5_eff * k;
    let friction = 3.0 * h + damping;
    dy[0] = y[4];
    dy[1] = y[5];
    dy[2] = y[6];
    dy[3] = y[7];
    dy[4] = -friction * y[4] - mass * y[0] + shift * y[0];
    dy[5] = -friction * y[5] - mass * y[1] + shift * y[1];
    dy[6] = -friction * y[6] - mass * y[2] - shift * y[2];
    dy[7] = -friction * y[7] - mass * y[3] - shift * y[3];
}

/// Volume-averaged E·B of an ensemble (temporal gauge, E = −Ȧ, A± = ±b±/k):
/// Σ weight·[Re(v₋ b̄₋) − Re(v₊ b̄₊)]/k.
pub fn edotb_average(modes: &[HelicalMode]) -> f64 {
    let terms: Vec<f64> = modes.iter().map(edotb_term).collect();
    pairwise_sum(&terms)
}

#[inline]
fn edotb_term(m: &HelicalMode) -> f64 {
    let plus = (m.v_plus * m.b_plus.conj()).re;
    let minus = (m.v_minus * m.b_minus.conj()).re;
    m.weight * (minus - plus) / m.k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Logarithmic,
}

/// Initial spectrum: `n_modes` bins between `k_min` and `k_max`, one mode at
/// each bin center, amplitude `amplitude · k^exponent` in both helicities,
/// phases uniform on the circle from a seeded ChaCha8 stream, velocities
/// zero. Each mode's weight is the shell volume 4πk²Δk of its bin.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    pub k_min: f64,
    pub k_max: f64,
    pub n_modes: usize,
    pub spacing: Spacing,
    pub amplitude: f64,
    pub exponent: f64,
    pub seed: u64,
    /// Exchange + and − initial data after drawing them.
    pub mirror: bool,
}

impl SpectrumSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_min > 0.0 && self.k_min.is_finite()) {
            return Err(Error::invalid("spectrum.k_min", "must be positive and finite"));
        }
        if !(self.k_max > self.k_min && self.k_max.is_finite()) {
            return Err(Error::invalid("spectrum.k_max", "must exceed k_min"));
        }
        if self.n_modes == 0 {
            return Err(Error::invalid("spectrum.n_modes", "must be at least 1"));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::invalid("spectrum.amplitude", "must be non-negative and finite"));
        }
        if !self.exponent.is_finite() {
            return Err(Error::invalid("spectrum.exponent", "must be finite"));
        }
        Ok(())
    }

    /// Bin edges in k.
    pub fn bin_edges(&self) -> Vec<f64> {
        let n = self.n_modes;
        (0..=n)
            .map(|i| {
                if i == n {
                    return self.k_max;
                }
                let s = i as f64 / n as f64;
                match self.spacing {
                    Spacing::Linear => self.k_min + s * (self.k_max - self.k_min),
                    Spacing::Logarithmic => self.k_min * math::pow(self.k_max / self.k_min, s),
                }
            })
            .collect()
    }

    pub fn initial_modes(&self) -> Result<Vec<HelicalMode>> {
        self.validate()?;
        let edges = self.bin_edges();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut modes = Vec::with_capacity(self.n_modes);
        for w in edges.windows(2) {
            let k = match self.spacing {
                Spacing::Linear => 0.5 * (w[0] + w[1]),
                Spacing::Logarithmic => math::sqrt(w[0] * w[1]),
            };
            let amp = self.amplitude * math::pow(k, self.exponent);
            let th_plus = 2.0 * math::PI * unit_f64(&mut rng);
            let th_minus = 2.0 * math::PI * unit_f64(&mut rng);
            let weight = 4.0 * math::PI * k * k * (w[1] - w[0]);
            let m = HelicalMode {
                k,
                b_plus: Complex64::new(amp * math::cos(th_plus), amp * math::sin(th_plus)),
                b_minus: Complex64::new(amp * math::cos(th_minus), amp * math::sin(th_minus)),
                v_plus: Complex64::new(0.0, 0.0),
                v_minus: Complex64::new(0.0, 0.0),
                weight,
            };
            modes.push(if self.mirror { m.helicity_swapped() } else { m });
        }
        Ok(modes)
    }
}

/// Uniform draw in [0, 1) with 53 random bits.
fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Axion self-interaction U(φ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    None,
    /// U = Λ⁴(1 − cos φ); the small-oscillation frequency is L·Λ².
    Cosine { scale: f64 },
}

impl Potential {
    pub fn value(&self, phi: f64) -> f64 {
        match *self {
            Potential::None => 0.0,
            Potential::Cosine { scale } => {
                let l2 = scale * scale;
                l2 * l2 * (1.0 - math::cos(phi))
            }
        }
    }

    /// dU/dφ.
    pub fn slope(&self, phi: f64) -> f64 {
        match *self {
            Potential::None => 0.0,
            Potential::Cosine { scale } => {
                let l2 = scale * scale;
                l2 * l2 * math::sin(phi)
            }
        }
    }
}

/// Homogeneous axion zero mode and its couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxionState {
    pub phi: f64,
    /// μ₅ = φ̇.
    pub mu5: f64,
    pub alpha: f64,
    /// Kinetic scale L (the axion kinetic term is (1/2αL²)(∂φ)²).
    pub l: f64,
    pub potential: Potential,
}

impl AxionState {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi.is_finite() && self.mu5.is_finite()) {
            return Err(Error::invalid("axion.phi/mu5", "must be finite"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("axion.alpha", "must be non-negative and finite"));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::invalid("axion.l", "must be positive and finite"));
        }
        if let Potential::Cosine { scale } = self.potential {
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(Error::invalid("axion.potential.scale", "must be positive and finite"));
            }
        }
        Ok(())
    }

    pub fn mu5_eff(&self) -> f64 {
        effective_mu5(self.alpha, self.mu5)
    }

    /// Small-oscillation angular frequency L·√U″(0), zero without potential.
    pub fn oscillation_frequency(&self) -> f64 {
        match self.potential {
            Potential::None => 0.0,
            Potential::Cosine { scale } => self.l * scale * scale,
        }
    }
}

/// Integration window, accuracy and output cadence.
#[derive(Debug, Clone, PartialEq)]
pub struct RunWindow {
    pub t0: f64,
    pub t1: f64,
    /// Relative and absolute local error tolerance per step.
    pub tol: f64,
    /// Number of uniform output intervals; samples at t0 + i(t1−t0)/n.
    pub n_samples: usize,
    /// Additional output times (e.g. spectrum snapshots), merged in.
    pub extra_samples: Vec<f64>,
    pub max_steps: usize,
    /// Experimental uniform Ohmic damping rate; zero disables it.
    pub ohmic_damping: f64,
}

impl RunWindow {
    pub fn new(t0: f64, t1: f64, tol: f64) -> Self {
        RunWindow { t0, t1, tol, n_samples: 1, extra_samples: Vec::new(), max_steps: 50_000_000, ohmic_damping: 0.0 }
    }

    pub fn validate(&self, bg: &Background) -> Result<()> {
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t0 < self.t1) {
            return Err(Error::invalid("evolve.t1", format!("need t0 < t1, got [{}, {}]", self.t0, self.t1)));
        }
        if !(self.tol > 1e-14 && self.tol < 1e-2) {
            return Err(Error::invalid("evolve.tol", format!("must lie in (1e-14, 1e-2), got {}", self.tol)));
        }
        if self.n_samples == 0 {
            return Err(Error::invalid("evolve.n_samples", "must be at least 1"));
        }
        if let Some(t) = self.extra_samples.iter().find(|t| !(**t >= self.t0 && **t <= self.t1)) {
            return Err(Error::invalid("evolve.snapshot_times", format!("{t} outside [t0, t1]")));
        }
        if !(self.ohmic_damping >= 0.0 && self.ohmic_damping.is_finite()) {
            return Err(Error::invalid("evolve.ohmic_damping", "must be non-negative"));
        }
        bg.eval(self.t0)?;
        bg.eval(self.t1)?;
        Ok(())
    }

    /// Sorted, de-duplicated output times.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.n_samples;
        let span = self.t1 - self.t0;
        let mut ts: Vec<f64> = (0..=n)
            .map(|i| if i == n { self.t1 } else { self.t0 + span * (i as f64 / n as f64) })
            .collect();
        ts.extend_from_slice(&self.extra_samples);
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();
        ts
    }

    fn control(&self) -> StepControl {
        StepControl { max_steps: self.max_steps, ..StepControl::with_tol(self.tol) }
    }
}

/// Per-sample diagnostics of the whole ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub energy: f64,
    pub helicity: f64,
    pub edotb: f64,
}

/// Sampled solution of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `modes[i]` is the full ensemble at `times[i]`.
    pub modes: Vec<Vec<HelicalMode>>,
    /// (φ, μ₅) at each sample.
    pub axion: Vec<(f64, f64)>,
    pub diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    /// Builds a trajectory from independently integrated mode histories
    /// (`histories[j][i]` = mode j at sample i).
    pub fn assemble(times: Vec<f64>, histories: Vec<Vec<HelicalMode>>, axion: Vec<(f64, f64)>) -> Self {
        let modes: Vec<Vec<HelicalMode>> =
            (0..times.len()).map(|i| histories.iter().map(|h| h[i]).collect()).collect();
        let diagnostics = modes
            .iter()
            .map(|ms| Diagnostics {
                energy: spectra::magnetic_energy(ms),
                helicity: spectra::helicity(ms),
                edotb: edotb_average(ms),
            })
            .collect();
        Trajectory { times, modes, axion, diagnostics }
    }

    pub fn final_modes(&self) -> &[HelicalMode] {
        self.modes.last().map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Largest |μ̇₅/μ₅²| estimated from consecutive samples.
    pub fn max_adiabaticity(&self) -> f64 {
        self.times
            .windows(2)
            .zip(self.axion.windows(2))
            .map(|(t, a)| {
                let rate = (a[1].1 - a[0].1) / (t[1] - t[0]);
                crate::dispersion::adiabaticity_ratio(0.5 * (a[0].1 + a[1].1), rate)
            })
            .fold(0.0, f64::max)
    }
}

struct ModeSystem<'a, P> {
    k: f64,
    bg: &'a Background,
    mu5_eff: &'a P,
    damping: f64,
}

impl<P: Fn(f64) -> f64> OdeSystem for ModeSystem<'_, P> {
    fn dim(&self) -> usize {
        MODE_DIM
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        match self.bg.eval(t) {
            Ok(st) => mode_rhs_raw(self.k, &st, (self.mu5_eff)(t), self.damping, y, dy),
            Err(_) => dy.fill(f64::NAN),
        }
    }
}

fn ode_error(e: OdeError, k: f64, max_steps: usize) -> Error {
    match e.kind {
        OdeFailure::StepUnderflow => Error::StepUnderflow { k, t: e.t },
        OdeFailure::StepBudget => Error::StepBudget { k, t: e.t, max_steps },
    }
}

/// Integrates one mode under a prescribed μ̃₅(t); returns the mode at every
/// time of `window.sample_times()`.
pub fn integrate_mode<P>(mode: &HelicalMode, bg: &Background, mu5_eff: &P, window: &RunWindow) -> Result<Vec<HelicalMode>>
where
    P: Fn(f64) -> f64,
{
    mode.validate()?;
    window.validate(bg)?;
    let samples = window.sample_times();
    let sys = ModeSystem { k: mode.k, bg, mu5_eff, damping: window.ohmic_damping };
    let mut y0 = [0.0; MODE_DIM];
    mode.write_state(&mut y0);
    let mut out = vec![*mode; samples.len()];
    ode::integrate(&sys, window.t0, &y0, window.t1, &samples, &window.control(), |i, y| {
        out[i] = mode.with_state(y)
    })
    .map_err(|e| ode_error(e, mode.k, window.max_steps))?;
    Ok(out)
}

/// φ(t) = φ₀ + ∫μ₅ dt at the sample times, for prescribed-μ₅ runs.
pub fn prescribed_axion_history<P>(phi0: f64, mu5: &P, window: &RunWindow) -> Result<Vec<(f64, f64)>>
where
    P: Fn(f64) -> f64,
{
    struct Quadrature<'a, P>(&'a P);
    impl<P: Fn(f64) -> f64> OdeSystem for Quadrature<'_, P> {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, t: f64, _y: &[f64], dy: &mut [f64]) {
            dy[0] = (self.0)(t);
        }
    }
    let samples = window.sample_times();
    let mut out = vec![(phi0, 0.0); samples.len()];
    ode::integrate(&Quadrature(mu5), window.t0, &[phi0], window.t1, &samples, &window.control(), |i, y| {
        out[i] = (y[0], mu5(samples[i]))
    })
    .map_err(|e| ode_error(e, 0.0, window.max_steps))?;
    Ok(out)
}

/// Prescribed-chirality run: each mode evolves independently under
/// μ̃₅(t) = (α/4π²)·μ₅(t). Sequential; callers wanting parallelism can map
/// [`integrate_mode`] themselves and use [`Trajectory::assemble`].
pub fn integrate_modes<P>(
    spec: &SpectrumSpec,
    bg: &Background,
    alpha: f64,
    phi0: f64,
    mu5: &P,
    window: &RunWindow,
) -> Result<Trajectory>
where
    P: Fn(f64) -> f64,
{
    let modes = spec.initial_modes()?;
    integrate_ensemble(&modes, bg, alpha, phi0, mu5, window)
}

/// [`integrate_modes`] on explicit initial data.
pub fn integrate_ensemble<P>(
    modes: &[HelicalMode],
    bg: &Background,
    alpha: f64,
    phi0: f64,
    mu5: &P,
    window: &RunWindow,
) -> Result<Trajectory>
where
    P: Fn(f64) -> f64,
{
    window.validate(bg)?;
    let mu5_eff = |t: f64| effective_mu5(alpha, mu5(t));
    let histories = modes
        .iter()
        .map(|m| integrate_mode(m, bg, &mu5_eff, window))
        .collect::<Result<Vec<_>>>()?;
    let axion = prescribed_axion_history(phi0, mu5, window)?;
    Ok(Trajectory::assemble(window.sample_times(), histories, axion))
}

struct CoupledSystem<'a> {
    modes: &'a [HelicalMode],
    bg: &'a Background,
    axion: AxionState,
    damping: f64,
}

impl OdeSystem for CoupledSystem<'_> {
    fn dim(&self) -> usize {
        MODE_DIM * self.modes.len() + 2
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let st = match self.bg.eval(t) {
            Ok(st) => st,
            Err(_) => {
                dy.fill(f64::NAN);
                return;
            }
        };
        let n = self.modes.len();
        let (phi, mu5) = (y[MODE_DIM * n], y[MODE_DIM * n + 1]);
        let mu5_eff = effective_mu5(self.axion.alpha, mu5);

        // single reduction of ⟨E·B⟩ over the stage state, then the mode update
        let terms: Vec<f64> = self
            .modes
            .iter()
            .enumerate()
            .map(|(j, m)| edotb_term(&m.with_state(&y[MODE_DIM * j..MODE_DIM * (j + 1)])))
            .collect();
        let edotb = pairwise_sum(&terms);
        for (j, m) in self.modes.iter().enumerate() {
            let r = MODE_DIM * j..MODE_DIM * (j + 1);
            mode_rhs_raw(m.k, &st, mu5_eff, self.damping, &y[r.clone()], &mut dy[r]);
        }
        let ax = &self.axion;
        let l2 = ax.l * ax.l;
        dy[MODE_DIM * n] = mu5;
        dy[MODE_DIM * n + 1] =
            l2 * ((ax.alpha / FOUR_PI_SQ) * edotb - ax.potential.slope(phi)) - 3.0 * st.hubble * mu5;
    }
}

/// Joint evolution of the mode ensemble and the axion zero mode, with
/// μ̃₅(t) = (α/4π²)·φ̇ fed back into every mode at every stage.
pub fn integrate_coupled(spec: &SpectrumSpec, bg: &Background, axion: &AxionState, window: &RunWindow) -> Result<Trajectory> {
    let modes = spec.initial_modes()?;
    integrate_coupled_ensemble(&modes, bg, axion, window)
}

/// [`integrate_coupled`] on explicit initial data; an empty ensemble evolves
/// the axion alone.
pub fn integrate_coupled_ensemble(
    modes: &[HelicalMode],
    bg: &Background,
    axion: &AxionState,
    window: &RunWindow,
) -> Result<Trajectory> {
    axion.validate()?;
    window.validate(bg)?;
    for m in modes {
        m.validate()?;
    }
    let n = modes.len();
    let sys = CoupledSystem { modes, bg, axion: *axion, damping: window.ohmic_damping };
    let mut y0 = vec![0.0; MODE_DIM * n + 2];
    for (j, m) in modes.iter().enumerate() {
        m.write_state(&mut y0[MODE_DIM * j..MODE_DIM * (j + 1)]);
    }
    y0[MODE_DIM * n] = axion.phi;
    y0[MODE_DIM * n + 1] = axion.mu5;

    let samples = window.sample_times();
    let mut snapshots: Vec<Vec<HelicalMode>> = Vec::with_capacity(samples.len());
    let mut ax_hist = Vec::with_capacity(samples.len());
    ode::integrate(&sys, window.t0, &y0, window.t1, &samples, &window.control(), |_, y| {
        snapshots.push(
            modes.iter().enumerate().map(|(j, m)| m.with_state(&y[MODE_DIM * j..MODE_DIM * (j + 1)])).collect(),
        );
        ax_hist.push((y[MODE_DIM * n], y[MODE_DIM * n + 1]));
    })
    .map_err(|e| {
        // report the largest k, the fastest-oscillating mode
        let k = modes
            .iter()
            .max_by(|a, b| a.k.partial_cmp(&b.k).unwrap())
            .map(|m| m.k)
            .unwrap_or(0.0);
        ode_error(e, k, window.max_steps)
    })?;

    let diagnostics = snapshots
        .iter()
        .map(|ms| Diagnostics {
            energy: spectra::magnetic_energy(ms),
            helicity: spectra::helicity(ms),
            edotb: edotb_average(ms),
        })
        .collect();
    Ok(Trajectory { times: samples, modes: snapshots, axion: ax_hist, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus_mode(k: f64, b: f64, v: f64) -> HelicalMode {
        HelicalMode { k, b_plus: c(b, 0.0), b_minus: c(0.0, 0.0), v_plus: c(v, 0.0), v_minus: c(0.0, 0.0), weight: 1.0 }
    }

    #[test]
    fn rhs_maxwell_limit() {
        let d = mode_rhs(&plus_mode(1.0, 1.0, 0.0), 0.0, &Background::Static, 0.0).unwrap();
        assert_eq!(d.v_plus, c(-1.0, 0.0));
        assert_eq!(d.b_plus, c(0.0, 0.0));
    }

    #[test]
    fn rhs_tachyonic() {
        let d = mode_rhs(&plus_mode(1.0, 1.0, 0.0), 0.0, &Background::Static, 4.0).unwrap();
        assert_eq!(d.v_plus, c(3.0, 0.0));
    }

    #[test]
    fn rhs_hubble_mass() {
        let bg = Background::de_sitter(1.0).unwrap();
        let d = mode_rhs(&plus_mode(2.0, 1.0, 0.0), 0.0, &bg, 0.0).unwrap();
        assert_eq!(d.v_plus, c(-6.25, 0.0));
    }

    #[test]
    fn rhs_propagates_domain_error() {
        let bg = Background::power_law(0.5, 1.0).unwrap();
        assert!(matches!(mode_rhs(&plus_mode(1.0, 1.0, 0.0), -1.0, &bg, 0.0), Err(Error::Domain { .. })));
        assert!(mode_rhs(&plus_mode(0.0, 1.0, 0.0), 1.0, &bg, 0.0).is_err());
    }

    #[test]
    fn rhs_minus_helicity_sign() {
        let m = HelicalMode { b_minus: c(1.0, 0.0), ..plus_mode(1.0, 0.0, 0.0) };
        let d = mode_rhs(&m, 0.0, &Background::Static, 4.0).unwrap();
        assert_eq!(d.v_minus, c(-5.0, 0.0));
    }

    #[test]
    fn edotb_examples() {
        assert_eq!(edotb_average(&[plus_mode(1.0, 2.0, 0.0)]), 0.0);
        let gamma = 1.3;
        let b = 2.0;
        assert!((edotb_average(&[plus_mode(1.0, b, gamma * b)]) + gamma * b * b).abs() < 1e-15);
        let m = HelicalMode { b_minus: c(0.4, 0.2), v_minus: c(0.1, -0.3), b_plus: c(0.4, 0.2), v_plus: c(0.1, -0.3), k: 2.0, weight: 1.0 };
        assert_eq!(edotb_average(&[m]), 0.0);
    }

    #[test]
    fn seeded_spectrum_is_reproducible() {
        let spec = SpectrumSpec {
            k_min: 0.1,
            k_max: 3.0,
            n_modes: 17,
            spacing: Spacing::Logarithmic,
            amplitude: 1e-3,
            exponent: 1.5,
            seed: 9,
            mirror: false,
        };
        let a = spec.initial_modes().unwrap();
        let b = spec.initial_modes().unwrap();
        assert_eq!(a, b);
        let other = SpectrumSpec { seed: 10, ..spec.clone() }.initial_modes().unwrap();
        assert_ne!(a, other);
        for m in &a {
            let amp = 1e-3 * math::pow(m.k, 1.5);
            assert!((math::hypot(m.b_plus.re, m.b_plus.im) - amp).abs() < 1e-15 * amp.max(1e-300) * 10.0);
            assert!(m.weight > 0.0);
        }
        let mirrored = SpectrumSpec { mirror: true, ..spec }.initial_modes().unwrap();
        assert_eq!(mirrored[3], a[3].helicity_swapped());
    }

    #[test]
    fn spectrum_validation() {
        let good = SpectrumSpec {
            k_min: 0.1,
            k_max: 1.0,
            n_modes: 2,
            spacing: Spacing::Linear,
            amplitude: 1.0,
            exponent: 0.0,
            seed: 0,
            mirror: false,
        };
        assert!(SpectrumSpec { k_min: 1.0, ..good.clone() }.validate().is_err());
        assert!(SpectrumSpec { n_modes: 0, ..good.clone() }.validate().is_err());
        assert!(SpectrumSpec { amplitude: -1.0, ..good.clone() }.validate().is_err());
        let edges = good.bin_edges();
        assert_eq!(edges, vec![0.1, 0.55, 1.0]);
    }

    #[test]
    fn window_validation() {
        let bg = Background::Static;
        assert!(RunWindow::new(1.0, 0.0, 1e-8).validate(&bg).is_err());
        assert!(RunWindow::new(0.0, 1.0, 1e-16).validate(&bg).is_err());
        assert!(RunWindow::new(0.0, 1.0, 0.1).validate(&bg).is_err());
        assert!(RunWindow::new(0.0, 1.0, 1e-8).validate(&Background::power_law(0.5, 1.0).unwrap()).is_err());
        let w = RunWindow { extra_samples: vec![0.25, 0.5], n_samples: 4, ..RunWindow::new(0.0, 1.0, 1e-8) };
        assert_eq!(w.sample_times(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn harmonic_period() {
        let w = RunWindow::new(0.0, 2.0 * math::PI, 1e-10);
        let hist = integrate_mode(&plus_mode(1.0, 1.0, 0.0), &Background::Static, &|_| 0.0, &w).unwrap();
        assert!((hist.last().unwrap().b_plus.re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn potential_periodic() {
        let u = Potential::Cosine { scale: 1.3 };
        for &phi in &[0.1, 1.0, -2.5] {
            assert!((u.value(phi + 2.0 * math::PI) - u.value(phi)).abs() < 1e-12);
        }
        assert_eq!(u.value(0.0), 0.0);
    }

    #[test]
    fn free_axion_drifts_linearly() {
        let ax = AxionState { phi: 0.3, mu5: 0.7, alpha: 1.0, l: 1.0, potential: Potential::None };
        let w = RunWindow { n_samples: 5, ..RunWindow::new(0.0, 4.0, 1e-10) };
        let tr = integrate_coupled_ensemble(&[], &Background::Static, &ax, &w).unwrap();
        for (t, (phi, mu5)) in tr.times.iter().zip(&tr.axion) {
            assert!((phi - (0.3 + 0.7 * t)).abs() < 1e-14);
            assert_eq!(*mu5, 0.7);
        }
    }

    #[test]
    fn stiffness_names_mode() {
        // huge growth rate with a tiny step budget
        let w = RunWindow { max_steps: 5, ..RunWindow::new(0.0, 10.0, 1e-10) };
        let err = integrate_mode(&plus_mode(3.0, 1.0, 0.0), &Background::Static, &|_| 0.0, &w).unwrap_err();
        assert!(matches!(err, Error::StepBudget { k, .. } if k == 3.0));
    }
}
