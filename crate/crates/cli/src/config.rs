//! Run configuration: a TOML file with one top-level `scenario` and the
//! sections that scenario reads. Unknown keys and sections the scenario does
//! not use are rejected.

use std::fmt;

use axion_hall_core::background::Background;
use axion_hall_core::cme::TransportParams;
use axion_hall_core::evolve::{AxionState, Potential, RunWindow, Spacing, SpectrumSpec};
use axion_hall_core::math;
use axion_hall_core::qhall::{AnomalySetup, ChargeVector, HallLattice, TestPotential};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "dispersion")]
    Dispersion,
    #[serde(rename = "shell")]
    Shell,
    #[serde(rename = "evolve")]
    Evolve,
    #[serde(rename = "evolve-coupled")]
    EvolveCoupled,
    #[serde(rename = "cme")]
    Cme,
    #[serde(rename = "hall-fraction")]
    HallFraction,
    #[serde(rename = "hall-enumerate")]
    HallEnumerate,
    #[serde(rename = "hall-anomaly-check")]
    HallAnomalyCheck,
    #[serde(rename = "hall-3d")]
    Hall3d,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Dispersion => "dispersion",
            Scenario::Shell => "shell",
            Scenario::Evolve => "evolve",
            Scenario::EvolveCoupled => "evolve-coupled",
            Scenario::Cme => "cme",
            Scenario::HallFraction => "hall-fraction",
            Scenario::HallEnumerate => "hall-enumerate",
            Scenario::HallAnomalyCheck => "hall-anomaly-check",
            Scenario::Hall3d => "hall-3d",
        }
    }

    /// Sections read by this scenario, besides `units`.
    fn sections(self) -> &'static [&'static str] {
        match self {
            Scenario::Dispersion | Scenario::Shell => &["background", "chiral"],
            Scenario::Evolve | Scenario::EvolveCoupled => &["background", "spectrum", "evolve", "axion"],
            Scenario::Cme => &["transport", "cme"],
            Scenario::HallFraction => &["lattice"],
            Scenario::HallEnumerate => &["enumerate"],
            Scenario::HallAnomalyCheck => &["anomaly"],
            Scenario::Hall3d => &["hall3d"],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; not part of the resolved configuration.
    #[serde(default, skip_serializing)]
    pub output: Option<String>,
    #[serde(default)]
    pub units: Units,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<BackgroundConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chiral: Option<ChiralConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axion: Option<AxionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transport: Option<TransportConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cme: Option<CmeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumerate: Option<EnumerateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anomaly: Option<AnomalyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hall3d: Option<Hall3dConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    #[serde(default = "one")]
    pub e2_over_h: f64,
    /// Defaults to 2π·e²/h.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl Default for Units {
    fn default() -> Self {
        Units { e2_over_h: 1.0, alpha: None }
    }
}

impl Units {
    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or_else(|| TransportParams::alpha_from_conductance_quantum(self.e2_over_h))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackgroundConfig {
    Static,
    DeSitter {
        hubble: f64,
    },
    PowerLaw {
        exponent: f64,
        #[serde(default = "one")]
        t_ref: f64,
    },
    Tabulated {
        times: Vec<f64>,
        scale_factors: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingConfig {
    Linear,
    Logarithmic,
}

impl From<SpacingConfig> for Spacing {
    fn from(s: SpacingConfig) -> Self {
        match s {
            SpacingConfig::Linear => Spacing::Linear,
            SpacingConfig::Logarithmic => Spacing::Logarithmic,
        }
    }
}

/// Frozen coefficients for `dispersion` and `shell`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiralConfig {
    /// Bare μ₅, scaled by α/4π².
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu5: Option<f64>,
    /// μ̃₅ given directly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu5_eff: Option<f64>,
    /// Time at which H and Ḣ are read from the background.
    #[serde(default)]
    pub time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<SpacingConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub n_modes: usize,
    #[serde(default = "logarithmic")]
    pub spacing: SpacingConfig,
    pub amplitude: f64,
    #[serde(default)]
    pub exponent: f64,
    #[serde(default)]
    pub mirror: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Experimental uniform Ohmic damping rate.
    #[serde(default)]
    pub ohmic_damping: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    None,
    Cosine { scale: f64 },
}

/// Prescribed μ₅(t) for `evolve`, measured from t0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Mu5Profile {
    Constant,
    Linear { rate: f64 },
    Exponential { decay_time: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxionConfig {
    #[serde(default)]
    pub phi: f64,
    pub mu5: f64,
    #[serde(default = "one")]
    pub l: f64,
    #[serde(default = "no_potential")]
    pub potential: PotentialConfig,
    #[serde(default = "constant_profile")]
    pub profile: Mu5Profile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportConfig {
    pub l: f64,
    pub tau: f64,
    #[serde(default)]
    pub diffusion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmeConfig {
    pub e: [f64; 3],
    pub b: [f64; 3],
    /// Evaluate the CME current at this μ₅ as well as at the steady value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu5: Option<f64>,
    #[serde(default)]
    pub phi_dot: f64,
    #[serde(default)]
    pub grad_phi: [f64; 3],
    #[serde(default)]
    pub mu5_0: f64,
    /// Relaxation time horizon; defaults to 20τ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_relax: Option<f64>,
    #[serde(default)]
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub gram: Vec<Vec<i64>>,
    pub q: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerateConfig {
    pub max_dim: usize,
    pub entry_bound: i64,
    pub charge_bound: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Bandlimited,
    NoParallelField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnomalyConfig {
    #[serde(default = "default_grids")]
    pub grids: Vec<usize>,
    #[serde(default = "one")]
    pub sigma0: f64,
    /// Constant σ_H when true; the strip is then ignored.
    #[serde(default)]
    pub uniform_sigma: bool,
    #[serde(default = "default_strip_start")]
    pub strip_start: f64,
    #[serde(default = "one")]
    pub strip_width: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "default_radius")]
    pub envelope_radius: f64,
    #[serde(default = "default_anomaly_time")]
    pub time: f64,
    #[serde(default = "bandlimited")]
    pub potential: PotentialKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hall3dConfig {
    pub k: [i64; 3],
    pub b: [f64; 3],
    pub e: [f64; 3],
}

fn one() -> f64 {
    1.0
}
fn logarithmic() -> SpacingConfig {
    SpacingConfig::Logarithmic
}
fn default_tol() -> f64 {
    1e-10
}
fn default_samples() -> usize {
    100
}
fn default_max_steps() -> usize {
    50_000_000
}
fn no_potential() -> PotentialConfig {
    PotentialConfig::None
}
fn constant_profile() -> Mu5Profile {
    Mu5Profile::Constant
}
fn default_grids() -> Vec<usize> {
    vec![64, 128, 256]
}
fn default_strip_start() -> f64 {
    -0.5
}
fn default_radius() -> f64 {
    0.8
}
fn default_anomaly_time() -> f64 {
    0.3
}
fn bandlimited() -> PotentialKind {
    PotentialKind::Bandlimited
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::config(Some(field), message)
}

fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    section.as_ref().ok_or_else(|| invalid(name, format!("section [{name}] is required")))
}

fn finite(field: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(field, format!("must be finite, got {x}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(None, e.to_string().trim_end().to_string()))
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self, CliError> {
        serde_json::from_value(value).map_err(|e| CliError::config(Some("config"), e.to_string()))
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario.expect("resolved configuration has a scenario")
    }

    /// Fills in the scenario and derived defaults and validates every field.
    pub fn resolve(mut self, scenario: Option<Scenario>, seed: Option<u64>) -> Result<Self, CliError> {
        self.scenario = match (self.scenario, scenario) {
            (None, None) => return Err(invalid("scenario", "no scenario in the configuration or on the command line")),
            (Some(a), Some(b)) if a != b && !(a == Scenario::EvolveCoupled && b == Scenario::Evolve) => {
                return Err(invalid("scenario", format!("configuration is for `{a}`, not `{b}`")))
            }
            (Some(a), _) => Some(a),
            (None, b) => b,
        };
        if let Some(s) = seed {
            self.seed = s;
        }
        let alpha = self.units.alpha();
        self.units.alpha = Some(alpha);
        self.check_sections()?;
        self.validate()?;
        Ok(self)
    }

    fn check_sections(&self) -> Result<(), CliError> {
        let present = [
            ("background", self.background.is_some()),
            ("chiral", self.chiral.is_some()),
            ("spectrum", self.spectrum.is_some()),
            ("evolve", self.evolve.is_some()),
            ("axion", self.axion.is_some()),
            ("transport", self.transport.is_some()),
            ("cme", self.cme.is_some()),
            ("lattice", self.lattice.is_some()),
            ("enumerate", self.enumerate.is_some()),
            ("anomaly", self.anomaly.is_some()),
            ("hall3d", self.hall3d.is_some()),
        ];
        let s = self.scenario();
        for (name, there) in present {
            if there && !s.sections().contains(&name) {
                return Err(invalid(name, format!("section [{name}] is not used by scenario `{s}`")));
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        let u = &self.units;
        if !(u.e2_over_h > 0.0 && u.e2_over_h.is_finite()) {
            return Err(invalid("units.e2_over_h", format!("must be positive, got {}", u.e2_over_h)));
        }
        let alpha = u.alpha();
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(invalid("units.alpha", format!("must be non-negative, got {alpha}")));
        }
        match self.scenario() {
            Scenario::Dispersion | Scenario::Shell => {
                self.chiral_params()?;
                self.k_grid()?;
            }
            Scenario::Evolve | Scenario::EvolveCoupled => {
                self.spectrum_spec()?;
                self.window()?;
                self.axion_state()?;
                self.mu5_profile()?;
            }
            Scenario::Cme => {
                self.transport()?;
                let c = require(&self.cme, "cme")?;
                for (f, v) in [("cme.e", c.e), ("cme.b", c.b), ("cme.grad_phi", c.grad_phi)] {
                    v.iter().try_for_each(|x| finite(f, *x).map(|_| ()))?;
                }
                finite("cme.phi_dot", c.phi_dot)?;
                finite("cme.mu5_0", c.mu5_0)?;
                finite("cme.q", c.q)?;
                if let Some(m) = c.mu5 {
                    finite("cme.mu5", m)?;
                }
                if let Some(t) = c.t_relax {
                    if !(t >= 0.0 && t.is_finite()) {
                        return Err(invalid("cme.t_relax", format!("must be non-negative, got {t}")));
                    }
                }
            }
            Scenario::HallFraction => {
                self.lattice()?;
            }
            Scenario::HallEnumerate => {
                let e = require(&self.enumerate, "enumerate")?;
                if e.max_dim == 0 || e.entry_bound <= 0 || e.charge_bound <= 0 {
                    return Err(invalid("enumerate", "max_dim, entry_bound and charge_bound must be positive"));
                }
            }
            Scenario::HallAnomalyCheck => {
                self.anomaly_setups()?;
            }
            Scenario::Hall3d => {
                let h = require(&self.hall3d, "hall3d")?;
                h.b.iter().chain(&h.e).try_for_each(|x| finite("hall3d", *x).map(|_| ()))?;
            }
        }
        Ok(())
    }

    pub fn background(&self) -> Result<Background, CliError> {
        let b = match self.background.as_ref().unwrap_or(&BackgroundConfig::Static) {
            BackgroundConfig::Static => Background::Static,
            BackgroundConfig::DeSitter { hubble } => Background::de_sitter(*hubble)?,
            BackgroundConfig::PowerLaw { exponent, t_ref } => Background::power_law(*exponent, *t_ref)?,
            BackgroundConfig::Tabulated { times, scale_factors } => {
                Background::tabulated(times.clone(), scale_factors.clone())?
            }
        };
        Ok(b)
    }

    /// μ̃₅ plus H and Ḣ at the configured time.
    pub fn chiral_params(&self) -> Result<axion_hall_core::dispersion::ChiralParams, CliError> {
        let c = require(&self.chiral, "chiral")?;
        let mu5_eff = match (c.mu5, c.mu5_eff) {
            (Some(m), None) => axion_hall_core::evolve::effective_mu5(self.units.alpha(), finite("chiral.mu5", m)?),
            (None, Some(m)) => finite("chiral.mu5_eff", m)?,
            _ => return Err(invalid("chiral.mu5", "give exactly one of mu5 and mu5_eff")),
        };
        let st = self.background()?.eval(finite("chiral.time", c.time)?)?;
        Ok(axion_hall_core::dispersion::ChiralParams::new(mu5_eff, st.hubble, st.hubble_dot))
    }

    /// k grid of the `dispersion` scenario; `None` for `shell`.
    pub fn k_grid(&self) -> Result<Option<Vec<f64>>, CliError> {
        let c = require(&self.chiral, "chiral")?;
        let given = c.k_min.is_some() || c.k_max.is_some() || c.n_k.is_some() || c.spacing.is_some();
        if self.scenario() == Scenario::Shell {
            if given {
                return Err(invalid("chiral.k_min", "the shell scenario takes no k grid"));
            }
            return Ok(None);
        }
        let (lo, hi, n) = match (c.k_min, c.k_max, c.n_k) {
            (Some(a), Some(b), Some(n)) => (a, b, n),
            _ => return Err(invalid("chiral.k_min", "dispersion needs k_min, k_max and n_k")),
        };
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(invalid("chiral.k_max", format!("need 0 < k_min < k_max, got [{lo}, {hi}]")));
        }
        if n < 2 {
            return Err(invalid("chiral.n_k", "need at least 2 points"));
        }
        let spacing = c.spacing.unwrap_or(SpacingConfig::Linear);
        Ok(Some(
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        return hi;
                    }
                    let s = i as f64 / (n - 1) as f64;
                    match spacing {
                        SpacingConfig::Linear => lo + s * (hi - lo),
                        SpacingConfig::Logarithmic => lo * math::pow(hi / lo, s),
                    }
                })
                .collect(),
        ))
    }

    pub fn spectrum_spec(&self) -> Result<SpectrumSpec, CliError> {
        let s = require(&self.spectrum, "spectrum")?;
        let spec = SpectrumSpec {
            k_min: s.k_min,
            k_max: s.k_max,
            n_modes: s.n_modes,
            spacing: s.spacing.into(),
            amplitude: s.amplitude,
            exponent: s.exponent,
            seed: self.seed,
            mirror: s.mirror,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn window(&self) -> Result<RunWindow, CliError> {
        let e = require(&self.evolve, "evolve")?;
        let w = RunWindow {
            t0: e.t0,
            t1: e.t1,
            tol: e.tol,
            n_samples: e.n_samples,
            extra_samples: self.snapshot_times()?,
            max_steps: e.max_steps,
            ohmic_damping: e.ohmic_damping,
        };
        if w.max_steps == 0 {
            return Err(invalid("evolve.max_steps", "must be positive"));
        }
        w.validate(&self.background()?)?;
        Ok(w)
    }

    /// Snapshot times, defaulting to the final time.
    pub fn snapshot_times(&self) -> Result<Vec<f64>, CliError> {
        let e = require(&self.evolve, "evolve")?;
        let mut ts = if e.snapshot_times.is_empty() { vec![e.t1] } else { e.snapshot_times.clone() };
        if ts.iter().any(|t| !t.is_finite()) {
            return Err(invalid("evolve.snapshot_times", "must be finite"));
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();
        Ok(ts)
    }

    pub fn axion_state(&self) -> Result<AxionState, CliError> {
        let a = require(&self.axion, "axion")?;
        let potential = match a.potential {
            PotentialConfig::None => Potential::None,
            PotentialConfig::Cosine { scale } => Potential::Cosine { scale },
        };
        if self.scenario() == Scenario::Evolve && potential != Potential::None {
            return Err(invalid("axion.potential", "a prescribed μ₅ run takes no potential; use evolve-coupled"));
        }
        let st = AxionState { phi: a.phi, mu5: a.mu5, alpha: self.units.alpha(), l: a.l, potential };
        st.validate()?;
        Ok(st)
    }

    pub fn mu5_profile(&self) -> Result<Mu5Profile, CliError> {
        let a = require(&self.axion, "axion")?;
        match (&a.profile, self.scenario()) {
            (Mu5Profile::Constant, _) => {}
            (_, Scenario::EvolveCoupled) => {
                return Err(invalid("axion.profile", "the coupled run evolves μ₅; only `constant` is allowed"))
            }
            (Mu5Profile::Linear { rate }, _) => {
                finite("axion.profile.rate", *rate)?;
            }
            (Mu5Profile::Exponential { decay_time }, _) => {
                if !(*decay_time > 0.0 && decay_time.is_finite()) {
                    return Err(invalid("axion.profile.decay_time", format!("must be positive, got {decay_time}")));
                }
            }
        }
        Ok(a.profile)
    }

    pub fn transport(&self) -> Result<TransportParams, CliError> {
        let t = require(&self.transport, "transport")?;
        Ok(TransportParams::new(self.units.alpha(), t.l, t.tau, t.diffusion)?)
    }

    pub fn lattice(&self) -> Result<(HallLattice, ChargeVector), CliError> {
        let l = require(&self.lattice, "lattice")?;
        let lat = HallLattice::validate(l.gram.clone()).map_err(axion_hall_core::Error::from)?;
        let q = ChargeVector::new(l.q.clone());
        if q.dim() != lat.dim() {
            return Err(invalid("lattice.q", format!("has {} entries, gram is {}×{}", q.dim(), lat.dim(), lat.dim())));
        }
        if !q.is_visible() {
            return Err(invalid("lattice.q", format!("{q} is not visible (gcd {})", q.gcd())));
        }
        Ok((lat, q))
    }

    pub fn anomaly_setups(&self) -> Result<Vec<AnomalySetup>, CliError> {
        let a = require(&self.anomaly, "anomaly")?;
        if a.grids.is_empty() {
            return Err(invalid("anomaly.grids", "need at least one grid size"));
        }
        if a.grids.iter().any(|&n| !(8..=4096).contains(&n)) {
            return Err(invalid("anomaly.grids", "grid sizes must lie in [8, 4096]"));
        }
        for (f, v) in [
            ("anomaly.sigma0", a.sigma0),
            ("anomaly.strip_start", a.strip_start),
            ("anomaly.strip_width", a.strip_width),
            ("anomaly.amplitude", a.amplitude),
            ("anomaly.time", a.time),
        ] {
            finite(f, v)?;
        }
        if !(a.envelope_radius > 0.0 && a.envelope_radius < 1.0) {
            return Err(invalid("anomaly.envelope_radius", format!("must lie in (0, 1), got {}", a.envelope_radius)));
        }
        let potential = match a.potential {
            PotentialKind::Bandlimited => TestPotential::Bandlimited,
            PotentialKind::NoParallelField => TestPotential::NoParallelField,
        };
        Ok(a
            .grids
            .iter()
            .map(|&n| AnomalySetup {
                n,
                sigma0: a.sigma0,
                strip: if a.uniform_sigma { None } else { Some((a.strip_start, a.strip_width)) },
                amplitude: a.amplitude,
                envelope_radius: a.envelope_radius,
                time: a.time,
                potential,
            })
            .collect())
    }
}
