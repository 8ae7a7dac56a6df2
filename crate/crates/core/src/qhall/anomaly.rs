//! Discrete bulk/edge anomaly-inflow check on the square [−1, 1]².
//!
//! Fields are derived from sampled potentials with centered differences,
//! E = −∇A₀ − ∂ₜA and B = ∂₁A₂ − ∂₂A₁, which makes the discrete Faraday law
//! hold to rounding. The bulk divergence
//!
//! ```text
//! D = ∂ₜ(σB) + ∇·j_bulk,   j_bulk = σ εE
//! ```
//!
//! then equals (∂ⱼσ)εʲᵏEₖ up to O(h²), and adding the predicted edge term
//! −(∂ⱼσ)εʲᵏEₖ cancels it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::transport::bulk_current;
use crate::math::{self, pairwise_sum, PI};
use crate::{Error, Result};

/// Fields larger than this (relative to their maximum) within two cells of
/// the outer boundary are rejected.
const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestPotential {
    /// Smooth compactly supported potential with all components and time
    /// dependence switched on.
    Bandlimited,
    /// A₀ = A₂ = 0, so E₂ (the field along the strip) vanishes.
    NoParallelField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnomalySetup {
    /// Grid points per axis.
    pub n: usize,
    /// Hall conductivity inside the sample.
    pub sigma0: f64,
    /// Transition strip [start, start + width] in x¹; `None` makes σ constant.
    pub strip: Option<(f64, f64)>,
    pub amplitude: f64,
    /// Radius of the potential's support around the origin.
    pub envelope_radius: f64,
    pub time: f64,
    pub potential: TestPotential,
}

impl AnomalySetup {
    pub fn new(n: usize) -> Self {
        AnomalySetup {
            n,
            sigma0: 1.0,
            strip: Some((-0.5, 1.0)),
            amplitude: 1.0,
            envelope_radius: 0.8,
            time: 0.3,
            potential: TestPotential::Bandlimited,
        }
    }
}

/// C^∞ step: 0 for u ≤ 0, 1 for u ≥ 1. Returns (S, S').
fn smooth_step(u: f64) -> (f64, f64) {
    if u <= 0.0 {
        return (0.0, 0.0);
    }
    if u >= 1.0 {
        return (1.0, 0.0);
    }
    let a = math::exp(-1.0 / u);
    let b = math::exp(-1.0 / (1.0 - u));
    let da = a / (u * u);
    let db = -b / ((1.0 - u) * (1.0 - u));
    let s = a + b;
    (a / s, (da * b - a * db) / (s * s))
}

fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        math::exp(1.0 - 1.0 / (1.0 - s * s))
    }
}

/// Sampled σ_H and potentials on an n×n grid. Index (i, j) ↦ j·n + i, with i
/// along x¹.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample2D {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub time: f64,
    pub coords: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Exact gradient of the σ_H profile.
    pub grad_sigma: Vec<[f64; 2]>,
    /// A₀ at t.
    pub a0: Vec<f64>,
    /// (A₁, A₂) at t − dt.
    pub a_prev: Vec<[f64; 2]>,
    /// (A₁, A₂) at t + dt.
    pub a_next: Vec<[f64; 2]>,
    pub strip: Option<(f64, f64)>,
}

impl GridSample2D {
    /// Samples arbitrary profiles. `sigma(x, y)` returns (σ, ∇σ),
    /// `potential(t, x, y)` returns (A₀, A₁, A₂).
    pub fn from_fields<S, P>(n: usize, time: f64, strip: Option<(f64, f64)>, sigma: S, potential: P) -> Result<Self>
    where
        S: Fn(f64, f64) -> (f64, [f64; 2]),
        P: Fn(f64, f64, f64) -> [f64; 3],
    {
        if n < 8 {
            return Err(Error::GridSetup(format!("need at least 8 points per axis, got {n}")));
        }
        let h = 2.0 / (n - 1) as f64;
        let dt = 0.5 * h;
        let coords: Vec<f64> = (0..n).map(|i| -1.0 + i as f64 * h).collect();
        let size = n * n;
        let mut g = GridSample2D {
            n,
            h,
            dt,
            time,
            coords,
            sigma: vec![0.0; size],
            grad_sigma: vec![[0.0; 2]; size],
            a0: vec![0.0; size],
            a_prev: vec![[0.0; 2]; size],
            a_next: vec![[0.0; 2]; size],
            strip,
        };
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (g.coords[i], g.coords[j]);
                let k = j * n + i;
                let (s, ds) = sigma(x, y);
                g.sigma[k] = s;
                g.grad_sigma[k] = ds;
                g.a0[k] = potential(time, x, y)[0];
                let p = potential(time - dt, x, y);
                let q = potential(time + dt, x, y);
                g.a_prev[k] = [p[1], p[2]];
                g.a_next[k] = [q[1], q[2]];
            }
        }
        Ok(g)
    }

    pub fn from_setup(s: &AnomalySetup) -> Result<Self> {
        if !(s.sigma0.is_finite() && s.amplitude.is_finite() && s.time.is_finite()) {
            return Err(Error::GridSetup("sigma0, amplitude and time must be finite".into()));
        }
        if !(s.envelope_radius > 0.0 && s.envelope_radius < 1.0) {
            return Err(Error::GridSetup(format!(
                "envelope radius must lie in (0, 1), got {}",
                s.envelope_radius
            )));
        }
        let sigma0 = s.sigma0;
        let strip = s.strip;
        let sigma = move |x: f64, _y: f64| match strip {
            None => (sigma0, [0.0, 0.0]),
            Some((c, w)) => {
                let (v, dv) = smooth_step((x - c) / w);
                (sigma0 * v, [sigma0 * dv / w, 0.0])
            }
        };
        let (amp, r) = (s.amplitude, s.envelope_radius);
        let kind = s.potential;
        let potential = move |t: f64, x: f64, y: f64| {
            let env = amp * bump(math::hypot(x, y) / r);
            if env == 0.0 {
                return [0.0; 3];
            }
            let a1 = env * math::cos(PI * y + 0.5 * t) * math::cos(0.5 * PI * x);
            match kind {
                TestPotential::Bandlimited => [
                    env * math::sin(PI * x + 0.3) * math::cos(PI * y - t),
                    a1,
                    env * math::sin(PI * x - 0.7 * t) * (1.0 + 0.5 * math::sin(PI * y)),
                ],
                TestPotential::NoParallelField => [0.0, a1, 0.0],
            }
        };
        GridSample2D::from_fields(s.n, s.time, strip, sigma, potential)
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    /// E at t on nodes 1..n−1 of each axis; zero on the outer ring.
    pub fn electric_field(&self) -> Vec<[f64; 2]> {
        let n = self.n;
        let mut e = vec![[0.0; 2]; n * n];
        let (h2, dt2) = (2.0 * self.h, 2.0 * self.dt);
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let k = self.idx(i, j);
                let d1 = (self.a0[self.idx(i + 1, j)] - self.a0[self.idx(i - 1, j)]) / h2;
                let d2 = (self.a0[self.idx(i, j + 1)] - self.a0[self.idx(i, j - 1)]) / h2;
                e[k] = [
                    -d1 - (self.a_next[k][0] - self.a_prev[k][0]) / dt2,
                    -d2 - (self.a_next[k][1] - self.a_prev[k][1]) / dt2,
                ];
            }
        }
        e
    }

    fn magnetic(&self, a: &[[f64; 2]]) -> Vec<f64> {
        let n = self.n;
        let h2 = 2.0 * self.h;
        let mut b = vec![0.0; n * n];
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let d1a2 = (a[self.idx(i + 1, j)][1] - a[self.idx(i - 1, j)][1]) / h2;
                let d2a1 = (a[self.idx(i, j + 1)][0] - a[self.idx(i, j - 1)][0]) / h2;
                b[self.idx(i, j)] = d1a2 - d2a1;
            }
        }
        b
    }

    /// (B(t − dt), B(t + dt)).
    pub fn magnetic_field(&self) -> (Vec<f64>, Vec<f64>) {
        (self.magnetic(&self.a_prev), self.magnetic(&self.a_next))
    }

    /// Nodes where the divergence is evaluated: 2..n−2 on each axis.
    pub fn interior(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (2..n - 2).flat_map(move |j| (2..n - 2).map(move |i| (i, j)))
    }

    fn check_support(&self, e: &[[f64; 2]], b: &[f64]) -> Result<()> {
        let n = self.n;
        if let Some((c, w)) = self.strip {
            let lo = self.coords[0] + 4.0 * self.h;
            let hi = self.coords[n - 1] - 4.0 * self.h;
            if !(w > 0.0 && c > lo && c + w < hi) {
                return Err(Error::GridSetup(format!(
                    "transition strip [{c}, {}] must lie strictly inside [{lo}, {hi}]",
                    c + w
                )));
            }
        }
        let mut scale = 0.0f64;
        let mut edge = 0.0f64;
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let k = self.idx(i, j);
                let m = math::abs(e[k][0]).max(math::abs(e[k][1])).max(math::abs(b[k]));
                scale = scale.max(m);
                if i <= 2 || j <= 2 || i >= n - 3 || j >= n - 3 {
                    edge = edge.max(m);
                }
            }
        }
        if edge > SUPPORT_TOL * scale.max(1.0) {
            return Err(Error::GridSetup(format!(
                "fields do not vanish near the outer boundary (max {edge:e})"
            )));
        }
        Ok(())
    }
}

/// Pointwise fields of the check, on the nodes of [`GridSample2D::interior`].
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyFields {
    pub nodes: Vec<(usize, usize)>,
    /// Bulk divergence D = ∂ₜ(σB) + ∇·j_bulk.
    pub bulk_divergence: Vec<f64>,
    /// Predicted edge term −(∂ⱼσ)εʲᵏEₖ.
    pub edge_term: Vec<f64>,
    /// Discrete Faraday residual ∂ₜB + ∂₁E₂ − ∂₂E₁.
    pub faraday: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnomalyReport {
    pub n: usize,
    pub h: f64,
    /// max |D + edge|.
    pub max_pointwise: f64,
    /// ∫|D + edge|.
    pub integrated_residual: f64,
    /// ∫(D + edge), the total-charge drift rate with edge currents included.
    pub signed_residual: f64,
    /// max |D|.
    pub bulk_only_max: f64,
    /// ∫|D|.
    pub bulk_only_integrated: f64,
    /// ∫D, the total-charge drift rate of the bulk current alone.
    pub bulk_only_signed: f64,
    /// ∫ −(∂ⱼσ)εʲᵏEₖ.
    pub edge_integral: f64,
    /// max |∂ₜB + ∂₁E₂ − ∂₂E₁|.
    pub faraday_max: f64,
}

/// Evaluates D, the edge term and Faraday's law without the support check.
pub fn anomaly_fields(g: &GridSample2D) -> Result<AnomalyFields> {
    let n = g.n;
    let e = g.electric_field();
    let (b_prev, b_next) = g.magnetic_field();
    let j = bulk_current(&g.sigma, &e)?;
    let (h2, dt2) = (2.0 * g.h, 2.0 * g.dt);
    let nodes: Vec<(usize, usize)> = g.interior().collect();
    let mut d = Vec::with_capacity(nodes.len());
    let mut edge = Vec::with_capacity(nodes.len());
    let mut far = Vec::with_capacity(nodes.len());
    for &(i, jj) in &nodes {
        let k = jj * n + i;
        let (r, l, u, dn) = (k + 1, k - 1, k + n, k - n);
        let dj0 = g.sigma[k] * (b_next[k] - b_prev[k]) / dt2;
        let div = (j[r][0] - j[l][0]) / h2 + (j[u][1] - j[dn][1]) / h2;
        d.push(dj0 + div);
        let gs = g.grad_sigma[k];
        edge.push(-(gs[0] * e[k][1] - gs[1] * e[k][0]));
        far.push((b_next[k] - b_prev[k]) / dt2 + (e[r][1] - e[l][1]) / h2 - (e[u][0] - e[dn][0]) / h2);
    }
    Ok(AnomalyFields { nodes, bulk_divergence: d, edge_term: edge, faraday: far })
}

/// Runs the check after validating the support assumptions.
pub fn anomaly_inflow_check(g: &GridSample2D) -> Result<(AnomalyReport, AnomalyFields)> {
    let e = g.electric_field();
    let (_, b_next) = g.magnetic_field();
    g.check_support(&e, &b_next)?;
    let f = anomaly_fields(g)?;
    let area = g.h * g.h;
    let total: Vec<f64> = f.bulk_divergence.iter().zip(&f.edge_term).map(|(d, e)| d + e).collect();
    let abs_total: Vec<f64> = total.iter().map(|x| math::abs(*x)).collect();
    let abs_d: Vec<f64> = f.bulk_divergence.iter().map(|x| math::abs(*x)).collect();
    let maxabs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(math::abs(*x)));
    let report = AnomalyReport {
        n: g.n,
        h: g.h,
        max_pointwise: maxabs(&total),
        integrated_residual: area * pairwise_sum(&abs_total),
        signed_residual: area * pairwise_sum(&total),
        bulk_only_max: maxabs(&f.bulk_divergence),
        bulk_only_integrated: area * pairwise_sum(&abs_d),
        bulk_only_signed: area * pairwise_sum(&f.bulk_divergence),
        edge_integral: area * pairwise_sum(&f.edge_term),
        faraday_max: maxabs(&f.faraday),
    };
    Ok((report, f))
}
