//! Small numeric helpers shared by the physics modules.
//!
//! Everything transcendental is routed through `libm` so that the same input
//! gives the same bits on every target.

use num_complex::Complex64;

pub use core::f64::consts::PI;

/// 4π², the denominator of the axion coupling α/4π².
pub const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

pub type Vec3 = [f64; 3];

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Principal square root of a complex number (branch cut on the negative
/// real axis, result has non-negative real part).
///
/// Uses only `sqrt` and `hypot`; a purely negative real argument maps to an
/// exactly imaginary result.
pub fn csqrt(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if x == 0.0 && y == 0.0 {
        return Complex64::new(0.0, y);
    }
    let t = sqrt(0.5 * (abs(x) + hypot(x, y)));
    if x >= 0.0 {
        Complex64::new(t, y / (2.0 * t))
    } else {
        Complex64::new(abs(y) / (2.0 * t), libm::copysign(t, y))
    }
}

/// Pairwise (cascade) summation. The result depends only on the order of
/// `values`, never on thread count or chunking.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        let mut s = 0.0;
        for v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn scale(c: f64, a: Vec3) -> Vec3 {
    [c * a[0], c * a[1], c * a[2]]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csqrt_negative_real_is_imaginary() {
        let r = csqrt(Complex64::new(-3.0, 0.0));
        assert_eq!(r.re, 0.0);
        assert_eq!(r.im, sqrt(3.0));
    }

    #[test]
    fn csqrt_squares_back() {
        for &(x, y) in &[(1.0, 2.0), (-4.0, 0.5), (-1e-3, -7.0), (9.0, 0.0), (0.0, -2.0)] {
            let z = Complex64::new(x, y);
            let r = csqrt(z);
            assert!(r.re >= 0.0);
            assert!((r * r - z).norm() < 1e-14 * z.norm().max(1.0));
        }
    }

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let v: alloc::vec::Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn cross_right_handed() {
        assert_eq!(cross([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]), [0.0, 1.0, 0.0]);
    }
}
