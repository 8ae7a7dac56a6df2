use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("gram matrix is empty")]
    Empty,
    #[error("gram matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("gram matrix is not symmetric: entry ({i}, {j}) differs from ({j}, {i})")]
    Asymmetric { i: usize, j: usize },
    #[error("gram matrix is not positive definite: leading principal minor of order {order} is {minor}")]
    NotPositiveDefinite { order: usize, minor: BigInt },
    #[error("lattice is even: every diagonal entry is even, so no vector has odd norm")]
    Even,
}

/// Odd integral lattice given by a symmetric positive-definite integer Gram
/// matrix with at least one odd diagonal entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallLattice {
    gram: Vec<Vec<i64>>,
    det: BigInt,
}

impl HallLattice {
    pub fn validate(gram: Vec<Vec<i64>>) -> core::result::Result<Self, LatticeError> {
        let n = gram.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        for (row, r) in gram.iter().enumerate() {
            if r.len() != n {
                return Err(LatticeError::NotSquare { row, len: r.len(), expected: n });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::Asymmetric { i, j });
                }
            }
        }
        let minors = leading_minors(&gram);
        if let Some((k, m)) = minors.iter().enumerate().find(|(_, m)| !m.is_positive()) {
            return Err(LatticeError::NotPositiveDefinite { order: k + 1, minor: m.clone() });
        }
        if gram.iter().enumerate().all(|(i, r)| r[i] % 2 == 0) {
            return Err(LatticeError::Even);
        }
        let det = minors[n - 1].clone();
        Ok(HallLattice { gram, det })
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    /// G⁻¹ over the rationals (the Gram matrix of the dual lattice).
    pub fn dual_gram(&self) -> Vec<Vec<BigRational>> {
        invert(&self.gram)
    }
}

/// Leading principal minors by fraction-free (Bareiss) elimination. The
/// sequence stops after the first non-positive minor.
fn leading_minors(gram: &[Vec<i64>]) -> Vec<BigInt> {
    let n = gram.len();
    let mut a: Vec<Vec<BigInt>> = gram.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut prev = BigInt::one();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = a[k][k].clone();
        out.push(pivot.clone());
        if !pivot.is_positive() {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &pivot - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = pivot;
    }
    out
}

/// Gauss-Jordan inverse of a nonsingular integer matrix.
fn invert(gram: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    let n = gram.len();
    let r = |x: i64| BigRational::from_integer(BigInt::from(x));
    let mut a: Vec<Vec<BigRational>> = gram.iter().map(|row| row.iter().map(|&x| r(x)).collect()).collect();
    let mut inv: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero()).expect("nonsingular gram");
        a.swap(col, p);
        inv.swap(col, p);
        let piv = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &piv;
            inv[col][j] = &inv[col][j] / &piv;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..n {
                let da = &f * &a[col][j];
                a[i][j] -= da;
                let di = &f * &inv[col][j];
                inv[i][j] -= di;
            }
        }
    }
    inv
}

/// Integer coordinates of a dual-lattice vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChargeVector(pub Vec<i64>);

impl ChargeVector {
    pub fn new(q: Vec<i64>) -> Self {
        ChargeVector(q)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn gcd(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &x| g.gcd(&x))
    }

    pub fn is_visible(&self) -> bool {
        self.gcd() == 1
    }

    /// Coordinates in the basis S: q ↦ Sᵀq.
    pub fn transform(&self, s: &[Vec<i64>]) -> ChargeVector {
        let n = self.dim();
        ChargeVector((0..n).map(|j| (0..n).map(|i| s[i][j] * self.0[i]).sum()).collect())
    }
}

impl fmt::Display for ChargeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Hall conductivity in units of e²/h, an exact rational in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HallFraction(pub BigRational);

impl HallFraction {
    pub fn new(numer: i64, denom: i64) -> Self {
        HallFraction(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Formats as "p/q", also for integers.
    pub fn to_ratio_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Display for HallFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// σ_H·h/e² = qᵀG⁻¹q.
pub fn hall_fraction(lat: &HallLattice, q: &ChargeVector) -> Result<HallFraction> {
    if q.dim() != lat.dim() {
        return Err(Error::DimensionMismatch { expected: lat.dim(), got: q.dim() });
    }
    if !q.is_visible() {
        return Err(Error::NotVisible(format!("{q}")));
    }
    let inv = lat.dual_gram();
    Ok(HallFraction(quadratic_form(&inv, &q.0)))
}

pub(crate) fn quadratic_form(m: &[Vec<BigRational>], q: &[i64]) -> BigRational {
    let n = q.len();
    let mut acc = BigRational::zero();
    for i in 0..n {
        if q[i] == 0 {
            continue;
        }
        let mut row = BigRational::zero();
        for j in 0..n {
            if q[j] != 0 {
                row += &m[i][j] * BigInt::from(q[j]);
            }
        }
        acc += row * BigInt::from(q[i]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn validation_examples() {
        assert!(HallLattice::validate(vec![vec![1]]).is_ok());
        assert_eq!(HallLattice::validate(vec![vec![2]]), Err(LatticeError::Even));
        let l = HallLattice::validate(vec![vec![3, 1], vec![1, 3]]).unwrap();
        assert_eq!(*l.det(), BigInt::from(8));
    }

    #[test]
    fn validation_witnesses() {
        assert_eq!(HallLattice::validate(vec![]), Err(LatticeError::Empty));
        assert_eq!(
            HallLattice::validate(vec![vec![1, 0], vec![0]]),
            Err(LatticeError::NotSquare { row: 1, len: 1, expected: 2 })
        );
        assert_eq!(
            HallLattice::validate(vec![vec![1, 2], vec![0, 1]]),
            Err(LatticeError::Asymmetric { i: 0, j: 1 })
        );
        assert_eq!(
            HallLattice::validate(vec![vec![1, 2], vec![2, 1]]),
            Err(LatticeError::NotPositiveDefinite { order: 2, minor: BigInt::from(-3) })
        );
        assert_eq!(
            HallLattice::validate(vec![vec![0]]),
            Err(LatticeError::NotPositiveDefinite { order: 1, minor: BigInt::from(0) })
        );
    }

    #[test]
    fn bareiss_minors_of_3x3() {
        let g = vec![vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 5]];
        let m = leading_minors(&g);
        assert_eq!(m, vec![BigInt::from(2), BigInt::from(5), BigInt::from(23)]);
    }

    #[test]
    fn fraction_examples() {
        let z = HallLattice::validate(vec![vec![1]]).unwrap();
        assert_eq!(hall_fraction(&z, &ChargeVector::new(vec![1])).unwrap(), HallFraction::new(1, 1));
        let l3 = HallLattice::validate(vec![vec![3]]).unwrap();
        let f = hall_fraction(&l3, &ChargeVector::new(vec![1])).unwrap();
        assert_eq!(f, HallFraction::new(1, 3));
        assert_eq!(f.to_ratio_string(), "1/3");
        let i2 = HallLattice::validate(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(hall_fraction(&i2, &ChargeVector::new(vec![1, 1])).unwrap(), HallFraction::new(2, 1));
    }

    #[test]
    fn fraction_errors() {
        let i2 = HallLattice::validate(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert!(matches!(hall_fraction(&i2, &ChargeVector::new(vec![2, 4])), Err(Error::NotVisible(_))));
        assert_eq!(
            hall_fraction(&i2, &ChargeVector::new(vec![1])),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn dual_gram_inverts() {
        let l = HallLattice::validate(vec![vec![3, 1], vec![1, 3]]).unwrap();
        let inv = l.dual_gram();
        assert_eq!(inv[0][0], BigRational::new(3.into(), 8.into()));
        assert_eq!(inv[0][1], BigRational::new((-1).into(), 8.into()));
    }
}
