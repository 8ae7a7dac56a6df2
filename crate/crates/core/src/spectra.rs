//! Quadratic diagnostics of a helical mode ensemble: magnetic energy,
//! magnetic helicity ∫A·B and their binned spectra.
//!
//! Normalization: every quantity is per unit comoving volume, with each
//! mode's `weight` carrying the k-space measure of its bin. In the helicity
//! basis A± = ±b±/k, so a mode contributes weight·(|b₊|² − |b₋|²)/k to the
//! helicity and weight·(|b₊|² + |b₋|²)/2 to the energy.

use alloc::vec::Vec;

use crate::evolve::HelicalMode;
use crate::math::pairwise_sum;
use crate::{Error, Result};

fn mode_energy(m: &HelicalMode) -> f64 {
    m.weight * 0.5 * (m.b_plus.norm_sqr() + m.b_minus.norm_sqr())
}

fn mode_helicity(m: &HelicalMode) -> f64 {
    m.weight * (m.b_plus.norm_sqr() - m.b_minus.norm_sqr()) / m.k
}

pub fn magnetic_energy(modes: &[HelicalMode]) -> f64 {
    let terms: Vec<f64> = modes.iter().map(mode_energy).collect();
    pairwise_sum(&terms)
}

pub fn helicity(modes: &[HelicalMode]) -> f64 {
    let terms: Vec<f64> = modes.iter().map(mode_helicity).collect();
    pairwise_sum(&terms)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSnapshot {
    pub time: f64,
    pub edges: Vec<f64>,
    /// Energy carried by the modes of each bin.
    pub energy: Vec<f64>,
    /// Helicity carried by the modes of each bin.
    pub helicity: Vec<f64>,
    pub total_energy: f64,
    pub total_helicity: f64,
}

impl SpectrumSnapshot {
    pub fn bins(&self) -> usize {
        self.energy.len()
    }

    /// Largest violation of |H_bin| ≤ 2·E_bin / k_lo over all bins, where
    /// k_lo is the lower bin edge. Non-positive means realizable.
    pub fn realizability_excess(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..self.bins() {
            let lo = self.edges[i];
            let bound = if lo > 0.0 { 2.0 * self.energy[i] / lo } else { f64::INFINITY };
            worst = worst.max(self.helicity[i].abs() - bound);
        }
        worst
    }

    /// Merges bins `i` and `i + 1` into one.
    pub fn merge_adjacent(&self, i: usize) -> SpectrumSnapshot {
        let mut out = self.clone();
        out.edges.remove(i + 1);
        let e = out.energy.remove(i + 1);
        out.energy[i] += e;
        let h = out.helicity.remove(i + 1);
        out.helicity[i] += h;
        out
    }
}

/// Bins `modes` by wavenumber. Bin `i` is `[edges[i], edges[i+1])`, the last
/// bin also includes its right edge.
pub fn snapshot(modes: &[HelicalMode], edges: &[f64], time: f64) -> Result<SpectrumSnapshot> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("bin_edges", "need at least two strictly increasing edges"));
    }
    let nbins = edges.len() - 1;
    let lo = edges[0];
    let hi = edges[nbins];
    let mut members: Vec<Vec<usize>> = (0..nbins).map(|_| Vec::new()).collect();
    for (j, m) in modes.iter().enumerate() {
        if !(m.k >= lo && m.k <= hi) {
            return Err(Error::Binning { k: m.k, lo, hi });
        }
        let bin = edges.partition_point(|e| *e <= m.k).saturating_sub(1).min(nbins - 1);
        members[bin].push(j);
    }
    let mut energy = Vec::with_capacity(nbins);
    let mut helic = Vec::with_capacity(nbins);
    for idx in &members {
        let e: Vec<f64> = idx.iter().map(|&j| mode_energy(&modes[j])).collect();
        let h: Vec<f64> = idx.iter().map(|&j| mode_helicity(&modes[j])).collect();
        energy.push(pairwise_sum(&e));
        helic.push(pairwise_sum(&h));
    }
    Ok(SpectrumSnapshot {
        time,
        edges: edges.to_vec(),
        total_energy: pairwise_sum(&energy),
        total_helicity: pairwise_sum(&helic),
        energy,
        helicity: helic,
    })
}
