//! Scalar fields used by the polynomial layer: double-precision complex
//! numbers and exact Gaussian rationals.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type C64 = Complex<f64>;
/// Gaussian rational `p + qi` with `p, q` in Q.
pub type QC = Complex<BigRational>;

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn conj(&self) -> Self;
    /// `|x|^2` embedded back into the field.
    fn abs_sq(&self) -> Self;
    fn to_c64(&self) -> C64;
    fn from_i64(v: i64) -> Self;
}

impl Scalar for C64 {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn abs_sq(&self) -> Self {
        C64::new(self.norm_sqr(), 0.0)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }
}

impl Scalar for QC {
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn abs_sq(&self) -> Self {
        Complex::new(&self.re * &self.re + &self.im * &self.im, BigRational::zero())
    }
    fn to_c64(&self) -> C64 {
        C64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }
    fn from_i64(v: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qc(re: BigRational, im: BigRational) -> QC {
    Complex::new(re, im)
}

pub fn qc_real(re: BigRational) -> QC {
    Complex::new(re, BigRational::zero())
}

/// Best continued-fraction approximation of `x` with denominator at most
/// `max_den`, accepted only if it lies within `tol` of `x`.
pub fn rational_approx(x: f64, tol: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    // Convergents h/k.
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut best: Option<(i128, i128)> = None;
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let approx = h1 as f64 / k1 as f64;
        if (approx - x.abs()).abs() <= tol {
            best = Some((h1, k1));
            break;
        }
        let frac = v - a;
        if frac < 1e-300 {
            break;
        }
        v = 1.0 / frac;
    }
    best.map(|(h, k)| {
        let r = BigRational::new(BigInt::from(h), BigInt::from(k));
        if neg { -r } else { r }
    })
}

/// Exact square root of a nonnegative rational, when it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().clone();
    let d = r.denom().clone();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &sn * &sn == n && &sd * &sd == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

pub fn c64_from_qc(z: &QC) -> C64 {
    z.to_c64()
}

/// Gaussian-rational reconstruction of a float complex number.
pub fn qc_approx(z: C64, tol: f64, max_den: i64) -> Option<QC> {
    Some(Complex::new(rational_approx(z.re, tol, max_den)?, rational_approx(z.im, tol, max_den)?))
}

pub fn qc_is_real_positive(z: &QC) -> bool {
    z.im.is_zero() && z.re.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstruct_simple_fractions() {
        assert_eq!(rational_approx(0.5, 1e-12, 1_000_000), Some(q(1, 2)));
        assert_eq!(rational_approx(-0.25, 1e-12, 1_000_000), Some(q(-1, 4)));
        assert_eq!(rational_approx(1.0 / 3.0, 1e-12, 1_000_000), Some(q(1, 3)));
        assert_eq!(rational_approx(0.0, 1e-12, 1_000_000), Some(q(0, 1)));
        assert_eq!(rational_approx(3.0f64.sqrt(), 1e-13, 1_000_000), None);
    }

    #[test]
    fn perfect_square_roots() {
        assert_eq!(rational_sqrt(&q(1, 4)), Some(q(1, 2)));
        assert_eq!(rational_sqrt(&q(9, 16)), Some(q(3, 4)));
        assert_eq!(rational_sqrt(&q(3, 4)), None);
    }
}
