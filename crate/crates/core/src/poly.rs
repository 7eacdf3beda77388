//! Dense univariate polynomials and Laurent (trigonometric) polynomials over
//! a [`Scalar`] field. Coefficients are stored in ascending order.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::One;

use crate::scalar::{Scalar, C64, QC};

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    c: Vec<T>,
}

pub type CPoly = Poly<C64>;
pub type QPoly = Poly<QC>;

impl<T: Scalar> Poly<T> {
    /// Builds a polynomial, dropping exactly-zero leading coefficients.
    pub fn new(mut c: Vec<T>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn constant(x: T) -> Self {
        Poly::new(vec![x])
    }

    pub fn one() -> Self {
        Poly::constant(T::one())
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![T::zero(); k + 1];
        c[k] = T::one();
        Poly { c }
    }

    /// `lead * prod (z - r)`.
    pub fn from_roots(lead: T, roots: &[T]) -> Self {
        let mut p = Poly::constant(lead);
        for r in roots {
            p = &p * &Poly::new(vec![-r.clone(), T::one()]);
        }
        p
    }

    pub fn coeffs(&self) -> &[T] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.c
    }

    pub fn coeff(&self, k: usize) -> T {
        self.c.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() { None } else { Some(self.c.len() - 1) }
    }

    /// Number of stored coefficients (`degree + 1`, or 0 for the zero polynomial).
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn leading(&self) -> T {
        self.c.last().cloned().unwrap_or_else(T::zero)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: &T) -> T {
        let mut acc = T::zero();
        for a in self.c.iter().rev() {
            acc = acc * z.clone() + a.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a.clone() * T::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly::new(self.c.iter().map(|a| a.clone() * s.clone()).collect())
    }

    /// `z^k p(z)`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![T::zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    pub fn conj_coeffs(&self) -> Self {
        Poly::new(self.c.iter().map(Scalar::conj).collect())
    }

    /// Reflection `z^d conj(p(1/conj z))` with `d = deg p`: reversed,
    /// conjugated coefficients. Roots map to `1/conj(r)`.
    pub fn reflect(&self) -> Self {
        Poly::new(self.c.iter().rev().map(Scalar::conj).collect())
    }

    /// Synthetic division by `z - r`: returns `(q, p(r))`.
    pub fn deflate(&self, r: &T) -> (Self, T) {
        if self.c.is_empty() {
            return (Poly::zero(), T::zero());
        }
        let n = self.c.len();
        let mut q = vec![T::zero(); n - 1];
        let mut acc = T::zero();
        for k in (0..n).rev() {
            acc = acc * r.clone() + self.c[k].clone();
            if k > 0 {
                q[k - 1] = acc.clone();
            }
        }
        (Poly::new(q), acc)
    }

    /// Squared coefficient norm, i.e. the `H^2` norm squared.
    pub fn norm_sq(&self) -> T {
        self.c.iter().fold(T::zero(), |acc, a| acc + a.abs_sq())
    }

    /// `H^2` inner product `sum a_k conj(b_k)`, linear in `self`.
    pub fn inner(&self, other: &Self) -> T {
        self.c
            .iter()
            .zip(other.c.iter())
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.conj())
    }

    /// Boundary values of `|p|^2` as a trigonometric polynomial.
    pub fn abs_sq_trig(&self) -> TrigPoly<T> {
        TrigPoly::product_conj(self, self)
    }

    /// First `n` Taylor coefficients of `num / den` (`den(0) != 0`).
    pub fn series_div(num: &Self, den: &Self, n: usize) -> Self {
        let d0 = den.coeff(0);
        let mut out: Vec<T> = Vec::with_capacity(n);
        for k in 0..n {
            let mut s = num.coeff(k);
            let top = den.len().min(k + 1);
            for j in 1..top {
                s = s - den.c[j].clone() * out[k - j].clone();
            }
            out.push(s / d0.clone());
        }
        Poly::new(out)
    }

    /// Keeps the first `n` coefficients.
    pub fn truncate(&self, n: usize) -> Self {
        Poly::new(self.c.iter().take(n).cloned().collect())
    }

    pub fn to_c64(&self) -> CPoly {
        Poly::new(self.c.iter().map(Scalar::to_c64).collect())
    }

    /// Euclidean division; `None` for a zero divisor.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        let dd = d.degree()?;
        let lead = d.leading();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return Some((Poly::zero(), self.clone()));
        }
        let mut qv = vec![T::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let f = r[k].clone() / lead.clone();
            if !f.is_zero() {
                for j in 0..=dd {
                    r[k - dd + j] = r[k - dd + j].clone() - f.clone() * d.c[j].clone();
                }
            }
            qv[k - dd] = f;
        }
        r.truncate(dd);
        Some((Poly::new(qv), Poly::new(r)))
    }
}

impl QPoly {
    /// Monic greatest common divisor (exact arithmetic only).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading();
        a.scale(&(QC::one() / lead))
    }
}

impl CPoly {
    pub fn from_real(c: &[f64]) -> Self {
        Poly::new(c.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Drops leading coefficients below `tol * max|c|`.
    pub fn trim_rel(&self, tol: f64) -> Self {
        let m = self.max_abs();
        let mut c = self.c.clone();
        while c.last().is_some_and(|x| x.norm() <= tol * m) {
            c.pop();
        }
        Poly::new(c)
    }

    /// Maximum coefficient deviation.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let n = self.len().max(other.len());
        (0..n).map(|k| (self.coeff(k) - other.coeff(k)).norm()).fold(0.0, f64::max)
    }

    pub fn norm_sq_f64(&self) -> f64 {
        self.c.iter().map(|a| a.norm_sqr()).sum()
    }
}

impl<T: Scalar> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.len().max(rhs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.len().max(rhs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![T::zero(); self.len() + rhs.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in rhs.c.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(c)
    }
}

impl<T: Scalar> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.c.iter().map(|a| -a.clone()).collect())
    }
}

/// `sum_{k=-deg}^{deg} w_k zeta^k`, stored with offset `deg`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly<T> {
    deg: usize,
    c: Vec<T>,
}

impl<T: Scalar> TrigPoly<T> {
    /// From coefficients `w_{-D}, ..., w_D` (odd length).
    pub fn from_symmetric(c: Vec<T>) -> Option<Self> {
        if c.len() % 2 == 0 {
            return None;
        }
        Some(TrigPoly { deg: c.len() / 2, c }.trimmed())
    }

    /// Boundary values of `p * conj(q)`.
    pub fn product_conj(p: &Poly<T>, q: &Poly<T>) -> Self {
        let d = p.len().max(q.len()).saturating_sub(1);
        let mut c = vec![T::zero(); 2 * d + 1];
        for (i, a) in p.coeffs().iter().enumerate() {
            for (j, b) in q.coeffs().iter().enumerate() {
                let k = d + i - j;
                c[k] = c[k].clone() + a.clone() * b.conj();
            }
        }
        TrigPoly { deg: d, c }.trimmed()
    }

    pub fn constant(x: T) -> Self {
        TrigPoly { deg: 0, c: vec![x] }
    }

    fn trimmed(mut self) -> Self {
        while self.deg > 0 && self.c[0].is_zero() && self.c[2 * self.deg].is_zero() {
            self.c.remove(0);
            self.c.pop();
            self.deg -= 1;
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn coeff(&self, k: i64) -> T {
        let idx = k + self.deg as i64;
        if idx < 0 || idx as usize >= self.c.len() {
            T::zero()
        } else {
            self.c[idx as usize].clone()
        }
    }

    /// Coefficients `w_{-D}..w_D`.
    pub fn coeffs(&self) -> &[T] {
        &self.c
    }

    pub fn is_hermitian(&self) -> bool {
        (0..=self.deg as i64).all(|k| self.coeff(-k) == self.coeff(k).conj())
    }

    /// Laurent lift `z^D w(z)`, a polynomial of degree `2D`.
    pub fn laurent_lift(&self) -> Poly<T> {
        Poly::new(self.c.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn to_c64(&self) -> TrigPoly<C64> {
        TrigPoly { deg: self.deg, c: self.c.iter().map(Scalar::to_c64).collect() }
    }
}

impl<T: Scalar> Add for &TrigPoly<T> {
    type Output = TrigPoly<T>;
    fn add(self, rhs: &TrigPoly<T>) -> TrigPoly<T> {
        let d = self.deg.max(rhs.deg) as i64;
        TrigPoly { deg: d as usize, c: (-d..=d).map(|k| self.coeff(k) + rhs.coeff(k)).collect() }
            .trimmed()
    }
}

impl<T: Scalar> Sub for &TrigPoly<T> {
    type Output = TrigPoly<T>;
    fn sub(self, rhs: &TrigPoly<T>) -> TrigPoly<T> {
        let d = self.deg.max(rhs.deg) as i64;
        TrigPoly { deg: d as usize, c: (-d..=d).map(|k| self.coeff(k) - rhs.coeff(k)).collect() }
            .trimmed()
    }
}

impl TrigPoly<C64> {
    /// Value at a point of the circle.
    pub fn eval_circle(&self, zeta: C64) -> C64 {
        let d = self.deg as i32;
        let inv = zeta.inv();
        let mut acc = self.c[self.deg];
        let mut pos = C64::new(1.0, 0.0);
        let mut neg = C64::new(1.0, 0.0);
        for k in 1..=d {
            pos *= zeta;
            neg *= inv;
            acc += self.coeff(k as i64) * pos + self.coeff(-(k as i64)) * neg;
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use num_complex::Complex;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn horner_and_arithmetic() {
        let p = CPoly::from_real(&[1.0, 1.0]);
        let q = CPoly::from_real(&[1.0, -1.0]);
        let pq = &p * &q;
        assert_eq!(pq, CPoly::from_real(&[1.0, 0.0, -1.0]));
        assert_eq!(pq.eval(&c(2.0, 0.0)), c(-3.0, 0.0));
        assert_eq!((&p - &p).degree(), None);
        assert_eq!(p.shift(2), CPoly::from_real(&[0.0, 0.0, 1.0, 1.0]));
    }

    #[test]
    fn deflation_returns_value() {
        let p = CPoly::from_real(&[2.0, -1.0, -1.0]);
        let (qq, rem) = p.deflate(&c(1.0, 0.0));
        assert!(rem.norm() < 1e-15);
        assert_eq!(qq, CPoly::from_real(&[-2.0, -1.0]));
        let (_, r2) = p.deflate(&c(3.0, 0.0));
        assert_eq!(r2, p.eval(&c(3.0, 0.0)));
    }

    #[test]
    fn series_division_geometric() {
        let num = CPoly::one();
        let den = CPoly::from_real(&[2.0, 1.0]);
        let s = Poly::series_div(&num, &den, 3);
        assert_eq!(s, CPoly::from_real(&[0.5, -0.25, 0.125]));
    }

    #[test]
    fn trig_abs_sq_of_half_one_plus_z() {
        let b = CPoly::from_real(&[0.5, 0.5]);
        let w = b.abs_sq_trig();
        assert_eq!(w.degree(), 1);
        assert_eq!(w.coeff(0), c(0.5, 0.0));
        assert_eq!(w.coeff(1), c(0.25, 0.0));
        assert_eq!(w.coeff(-1), c(0.25, 0.0));
        assert!(w.is_hermitian());
        let z = C64::from_polar(1.0, 0.7);
        assert!((w.eval_circle(z) - c(b.eval(&z).norm_sqr(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exact_polys() {
        let half = Complex::new(q(1, 2), q(0, 1));
        let p: QPoly = Poly::new(vec![half.clone(), half.clone()]);
        let n = p.norm_sq();
        assert_eq!(n.re, q(1, 2));
        let r = p.reflect();
        assert_eq!(r, p);
    }
}
