//! Prescribed cosmological backgrounds: scale factor a(t), Hubble rate
//! H = ȧ/a and its derivative Ḣ.

use alloc::format;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Scale factor, Hubble rate and Hubble-rate derivative at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundState {
    pub a: f64,
    pub hubble: f64,
    pub hubble_dot: f64,
}

impl BackgroundState {
    /// K = 9H² + 6Ḣ, the expansion offset that decides the instability band.
    pub fn shell_offset(&self) -> f64 {
        9.0 * self.hubble * self.hubble + 6.0 * self.hubble_dot
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Background {
    /// Flat, non-expanding space: a = 1.
    Static,
    /// a = exp(H₀ t).
    DeSitter { hubble: f64 },
    /// a = (t / t_ref)^p, defined for t > 0.
    PowerLaw { exponent: f64, t_ref: f64 },
    Tabulated(Tabulated),
}

impl Background {
    pub fn de_sitter(hubble: f64) -> Result<Self> {
        if !hubble.is_finite() {
            return Err(Error::invalid("background.hubble", "must be finite"));
        }
        Ok(Background::DeSitter { hubble })
    }

    pub fn power_law(exponent: f64, t_ref: f64) -> Result<Self> {
        if !exponent.is_finite() {
            return Err(Error::invalid("background.exponent", "must be finite"));
        }
        if !(t_ref > 0.0 && t_ref.is_finite()) {
            return Err(Error::invalid("background.t_ref", format!("must be positive, got {t_ref}")));
        }
        Ok(Background::PowerLaw { exponent, t_ref })
    }

    pub fn tabulated(times: Vec<f64>, scale_factors: Vec<f64>) -> Result<Self> {
        Tabulated::new(times, scale_factors).map(Background::Tabulated)
    }

    /// Closed interval of valid times.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Background::Static | Background::DeSitter { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Background::PowerLaw { .. } => (0.0, f64::INFINITY),
            Background::Tabulated(tab) => (tab.times[0], tab.times[tab.times.len() - 1]),
        }
    }

    /// Evaluates (a, H, Ḣ) at `t`.
    pub fn eval(&self, t: f64) -> Result<BackgroundState> {
        let (lo, hi) = self.domain();
        let in_domain = match self {
            Background::PowerLaw { .. } => t > 0.0 && t < hi,
            _ => t >= lo && t <= hi,
        };
        if !in_domain || t.is_nan() {
            return Err(Error::Domain { t, lo, hi });
        }
        Ok(match *self {
            Background::Static => BackgroundState { a: 1.0, hubble: 0.0, hubble_dot: 0.0 },
            Background::DeSitter { hubble } => {
                BackgroundState { a: math::exp(hubble * t), hubble, hubble_dot: 0.0 }
            }
            Background::PowerLaw { exponent, t_ref } => BackgroundState {
                a: math::pow(t / t_ref, exponent),
                hubble: exponent / t,
                hubble_dot: -exponent / (t * t),
            },
            Background::Tabulated(ref tab) => tab.eval(t),
        })
    }
}

/// Sampled a(t) with a monotone piecewise-cubic (Fritsch–Carlson) interpolant.
///
/// H and Ḣ are taken from the interpolant's first and second derivatives:
/// H = a'/a, Ḣ = a''/a − H².
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    times: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Tabulated {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), got: values.len() });
        }
        if times.len() < 2 {
            return Err(Error::invalid("background.times", "need at least two samples"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("background.times", "must be finite and strictly increasing"));
        }
        if values.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::invalid("background.scale_factors", "must be positive and finite"));
        }
        let slopes = monotone_slopes(&times, &values);
        Ok(Tabulated { times, values, slopes })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    fn eval(&self, t: f64) -> BackgroundState {
        let n = self.times.len();
        // index of the interval [t_i, t_{i+1}] containing t
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;

        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let a = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;

        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        let da = d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1;

        let dd00 = (12.0 * s - 6.0) / (h * h);
        let dd10 = (6.0 * s - 4.0) / h;
        let dd01 = (-12.0 * s + 6.0) / (h * h);
        let dd11 = (6.0 * s - 2.0) / h;
        let dda = dd00 * y0 + dd10 * m0 + dd01 * y1 + dd11 * m1;

        let hubble = da / a;
        BackgroundState { a, hubble, hubble_dot: dda / a - hubble * hubble }
    }
}

/// Fritsch–Carlson slopes: three-point estimates limited so that the Hermite
/// cubic stays monotone on every interval where the data are.
fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    if n == 2 {
        return alloc::vec![delta[0], delta[0]];
    }
    let mut m = alloc::vec![0.0; n];
    for i in 1..n - 1 {
        let (d0, d1) = (delta[i - 1], delta[i]);
        if d0 * d1 <= 0.0 {
            m[i] = 0.0;
        } else {
            // weighted harmonic mean (Fritsch–Butland), handles uneven spacing
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            let w0 = 2.0 * h1 + h0;
            let w1 = h1 + 2.0 * h0;
            m[i] = (w0 + w1) / (w0 / d0 + w1 / d1);
        }
    }
    m[0] = end_slope(x[1] - x[0], x[2] - x[1], delta[0], delta[1]);
    m[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], delta[n - 2], delta[n - 3]);
    m
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && math::abs(m) > math::abs(3.0 * d0) {
        3.0 * d0
    } else {
        m
    }
}
