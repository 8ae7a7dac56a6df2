use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;

use super::lattice::{quadratic_form, ChargeVector, HallFraction, HallLattice};
use crate::{Error, Result};

const MAX_DIM: usize = 3;
const MAX_BOUND: i64 = 6;
const MAX_WORK: u128 = 20_000_000;

/// One (lattice, charge vector, fraction) triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeCandidate {
    pub lattice: HallLattice,
    pub q: ChargeVector,
    pub fraction: HallFraction,
}

/// A distinct fraction together with the first (gram, q) producing it and
/// the number of pairs that produce it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedFraction {
    pub fraction: HallFraction,
    pub lattice: HallLattice,
    pub q: ChargeVector,
    pub multiplicity: u64,
}

fn check_bounds(n_max: usize, entry_bound: i64, q_bound: i64) -> Result<()> {
    if n_max == 0 || entry_bound < 1 || q_bound < 1 {
        return Err(Error::invalid("enumeration bounds", "dimension and bounds must be at least 1"));
    }
    if n_max > MAX_DIM || entry_bound > MAX_BOUND || q_bound > MAX_BOUND {
        return Err(Error::ResourceGuard {
            reason: format!(
                "need n_max <= {MAX_DIM} and bounds <= {MAX_BOUND}, got n_max = {n_max}, entry_bound = {entry_bound}, q_bound = {q_bound}"
            ),
        });
    }
    let b = entry_bound as u128;
    let qb = (2 * q_bound + 1) as u128;
    let mut work = 0u128;
    for n in 1..=n_max as u32 {
        let grams = b.pow(n) * (2 * b + 1).pow(n * (n - 1) / 2);
        work += grams * (qb.pow(n) - 1) / 2;
    }
    if work > MAX_WORK {
        return Err(Error::ResourceGuard {
            reason: format!("{work} (gram, q) pairs exceed the limit of {MAX_WORK}"),
        });
    }
    Ok(())
}

/// All symmetric integer N×N matrices with diagonal in 1..=b and
/// off-diagonal entries in −b..=b, in lexicographic order of the upper
/// triangle.
fn grams(n: usize, b: i64) -> Vec<Vec<Vec<i64>>> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut g = vec![vec![0i64; n]; n];
    fn rec(k: usize, slots: &[(usize, usize)], b: i64, g: &mut Vec<Vec<i64>>, out: &mut Vec<Vec<Vec<i64>>>) {
        if k == slots.len() {
            out.push(g.clone());
            return;
        }
        let (i, j) = slots[k];
        let lo = if i == j { 1 } else { -b };
        for v in lo..=b {
            g[i][j] = v;
            g[j][i] = v;
            rec(k + 1, slots, b, g, out);
        }
    }
    rec(0, &slots, b, &mut g, &mut out);
    out
}

/// Visible vectors in [−qb, qb]ᴺ whose first nonzero coordinate is positive.
fn charges(n: usize, qb: i64) -> Vec<ChargeVector> {
    let width = (2 * qb + 1) as usize;
    let total = width.pow(n as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut r = idx;
        let mut q = Vec::with_capacity(n);
        for _ in 0..n {
            q.push((r % width) as i64 - qb);
            r /= width;
        }
        q.reverse();
        let lead = q.iter().copied().find(|&x| x != 0);
        if matches!(lead, Some(x) if x > 0) {
            let c = ChargeVector(q);
            if c.is_visible() {
                out.push(c);
            }
        }
    }
    out
}

/// Every valid odd lattice (dimension 1..=n_max) and visible canonical q
/// within the bounds, with its fraction.
pub fn enumerate_all(n_max: usize, entry_bound: i64, q_bound: i64) -> Result<Vec<LatticeCandidate>> {
    let mut out = Vec::new();
    for_each(n_max, entry_bound, q_bound, |lattice, q, fraction| {
        out.push(LatticeCandidate { lattice: lattice.clone(), q: q.clone(), fraction });
    })?;
    Ok(out)
}

fn for_each<F>(n_max: usize, entry_bound: i64, q_bound: i64, mut f: F) -> Result<()>
where
    F: FnMut(&HallLattice, &ChargeVector, HallFraction),
{
    check_bounds(n_max, entry_bound, q_bound)?;
    for n in 1..=n_max {
        let qs = charges(n, q_bound);
        for g in grams(n, entry_bound) {
            let Ok(lat) = HallLattice::validate(g) else { continue };
            let inv = lat.dual_gram();
            for q in &qs {
                let v: BigRational = quadratic_form(&inv, &q.0);
                f(&lat, q, HallFraction(v));
            }
        }
    }
    Ok(())
}

/// Distinct fractions reachable within the bounds, sorted ascending.
/// Isometric lattices are not identified; a fraction's multiplicity counts
/// every (gram, q) pair that yields it.
pub fn enumerate_fractions(n_max: usize, entry_bound: i64, q_bound: i64) -> Result<Vec<EnumeratedFraction>> {
    let mut found: BTreeMap<HallFraction, EnumeratedFraction> = BTreeMap::new();
    for_each(n_max, entry_bound, q_bound, |lattice, q, fraction| {
        found
            .entry(fraction.clone())
            .and_modify(|e| e.multiplicity += 1)
            .or_insert_with(|| EnumeratedFraction { fraction, lattice: lattice.clone(), q: q.clone(), multiplicity: 1 });
    })?;
    Ok(found.into_values().collect())
}
