//! Analytic functions on the closed disk given by polynomial, rational or
//! finite Blaschke data, with boundary sampling and coefficient access.

pub mod arc;
pub mod literal;
pub mod measure;
pub mod roots;

use std::f64::consts::TAU;
use std::sync::{Arc as Shared, OnceLock};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{HbError, Result};
use crate::poly::{CPoly, QPoly};
use crate::scalar::{C64, QC};

pub use arc::{covers_circle, uncovered_length, Arc};
pub use measure::{cauchy, herglotz, Atom, Measure};
pub use roots::{roots, Root};

/// Distance from the circle inside which a denominator root is a boundary pole.
const POLE_TOL: f64 = 1e-8;

/// `k`-th of the `n` roots of unity.
pub fn node(n: usize, k: usize) -> C64 {
    C64::from_polar(1.0, TAU * k as f64 / n as f64)
}

/// All `n` roots of unity in counterclockwise order from 1.
pub fn nodes(n: usize) -> Vec<C64> {
    (0..n).map(|k| node(n, k)).collect()
}

/// Angle of `z` normalized to `[0, 2pi)`.
pub fn angle_of(z: C64) -> f64 {
    normalize_angle(z.arg())
}

pub fn normalize_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Polynomial,
    Rational,
    Blaschke,
}

/// A function on the closed disk stored as `num / den` with `den(0) = 1`.
///
/// Blaschke data is kept alongside the quotient form so callers can read the
/// zero list back. An exact Gaussian-rational copy is attached when the
/// input was exact.
#[derive(Debug, Clone)]
pub struct UnitCircleFunction {
    kind: Kind,
    num: CPoly,
    den: CPoly,
    zeros: Vec<C64>,
    phase: C64,
    boundary_singular: bool,
    exact: Option<(QPoly, QPoly)>,
    samples: OnceLock<(usize, Shared<Vec<C64>>)>,
}

impl PartialEq for UnitCircleFunction {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.num == other.num && self.den == other.den
    }
}

fn check_finite(p: &CPoly) -> Result<()> {
    if p.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(HbError::Numerical { reason: "non-finite coefficient".into() })
    }
}

impl UnitCircleFunction {
    pub fn polynomial(p: CPoly) -> Result<Self> {
        check_finite(&p)?;
        Ok(Self::raw(Kind::Polynomial, p, CPoly::one(), false, None))
    }

    pub fn polynomial_exact(p: QPoly) -> Self {
        Self::raw(Kind::Polynomial, p.to_c64(), CPoly::one(), false, Some((p, QPoly::one())))
    }

    pub fn constant(c: C64) -> Self {
        Self::raw(Kind::Polynomial, CPoly::constant(c), CPoly::one(), false, None)
    }

    /// `num / den` with `den` zero-free on the closed disk.
    pub fn rational(num: CPoly, den: CPoly) -> Result<Self> {
        Self::build_rational(num, den, false, None)
    }

    /// `num / den` where `den` may vanish on the circle but not inside it.
    pub fn rational_singular(num: CPoly, den: CPoly) -> Result<Self> {
        Self::build_rational(num, den, true, None)
    }

    /// Exact rational data. Common factors are removed exactly.
    pub fn rational_exact(num: QPoly, den: QPoly) -> Result<Self> {
        Self::from_exact(num, den, false)
    }

    pub fn from_exact(num: QPoly, den: QPoly, allow_boundary: bool) -> Result<Self> {
        if den.is_zero() {
            return Err(HbError::ZeroPolynomial);
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.degree().unwrap_or(0) > 0 {
            (num.div_rem(&g).unwrap().0, den.div_rem(&g).unwrap().0)
        } else {
            (num, den)
        };
        // Normalize den(0) = 1 when possible, otherwise the leading coefficient.
        let d0 = d.coeff(0);
        let s = if !d0.is_zero() { d0 } else { d.leading() };
        let inv = QC::one() / s;
        n = n.scale(&inv);
        d = d.scale(&inv);
        let f = Self::build_rational(n.to_c64(), d.to_c64(), allow_boundary, None)?;
        Ok(f.with_exact(Some((n, d))))
    }

    fn build_rational(num: CPoly, den: CPoly, allow_boundary: bool, exact: Option<(QPoly, QPoly)>) -> Result<Self> {
        check_finite(&num)?;
        check_finite(&den)?;
        let den = den.trim_rel(1e-15);
        if den.is_zero() {
            return Err(HbError::ZeroPolynomial);
        }
        let (num, den) = cancel_common(&num, &den);
        let mut singular = false;
        if den.degree().unwrap_or(0) > 0 {
            for r in roots::roots(&den, 1e-7)? {
                let m = r.value.norm();
                if m < 1.0 - POLE_TOL {
                    return Err(HbError::PoleAt { re: r.value.re, im: r.value.im });
                }
                if m <= 1.0 + POLE_TOL {
                    if !allow_boundary {
                        return Err(HbError::BoundaryPole);
                    }
                    singular = true;
                }
            }
        }
        let d0 = den.coeff(0);
        let s = if d0.norm() > 0.0 { d0 } else { den.leading() };
        let num = num.scale(&s.inv());
        let den = den.scale(&s.inv());
        if den.degree() == Some(0) {
            let c = den.coeff(0);
            return Ok(Self::raw(Kind::Polynomial, num.scale(&c.inv()), CPoly::one(), false, exact));
        }
        Ok(Self::raw(Kind::Rational, num, den, singular, exact))
    }

    /// `phase * prod (z - a_i) / (1 - conj(a_i) z)`.
    pub fn blaschke(zeros: Vec<C64>, phase: C64) -> Result<Self> {
        if (phase.norm() - 1.0).abs() > 1e-12 {
            return Err(HbError::NotUnimodular { modulus: phase.norm() });
        }
        for z in &zeros {
            if z.norm() >= 1.0 {
                return Err(HbError::OutsideDisk { modulus: z.norm() });
            }
        }
        let one = C64::new(1.0, 0.0);
        let mut num = CPoly::constant(phase);
        let mut den = CPoly::one();
        for a in &zeros {
            num = &num * &CPoly::new(vec![-a, one]);
            den = &den * &CPoly::new(vec![one, -a.conj()]);
        }
        let mut f = Self::raw(Kind::Blaschke, num, den, false, None);
        f.zeros = zeros;
        f.phase = phase;
        Ok(f)
    }

    pub(crate) fn with_exact(mut self, exact: Option<(QPoly, QPoly)>) -> Self {
        self.exact = exact;
        self
    }

    fn raw(kind: Kind, num: CPoly, den: CPoly, singular: bool, exact: Option<(QPoly, QPoly)>) -> Self {
        UnitCircleFunction {
            kind,
            num,
            den,
            zeros: Vec::new(),
            phase: C64::new(1.0, 0.0),
            boundary_singular: singular,
            exact,
            samples: OnceLock::new(),
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn num(&self) -> &CPoly {
        &self.num
    }

    pub fn den(&self) -> &CPoly {
        &self.den
    }

    pub fn exact(&self) -> Option<(&QPoly, &QPoly)> {
        self.exact.as_ref().map(|(n, d)| (n, d))
    }

    /// Exact polynomial data, when available and the denominator is 1.
    pub fn exact_polynomial(&self) -> Option<&QPoly> {
        match &self.exact {
            Some((n, d)) if d.degree() == Some(0) && *d == QPoly::one() => Some(n),
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn as_polynomial(&self) -> Option<&CPoly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn is_boundary_singular(&self) -> bool {
        self.boundary_singular
    }

    pub fn blaschke_zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn blaschke_phase(&self) -> C64 {
        self.phase
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().unwrap_or(0) == 0 && self.den.degree().unwrap_or(0) == 0
    }

    /// Value at `z` with `|z| <= 1` (small slack allowed).
    pub fn eval(&self, z: C64) -> Result<C64> {
        if z.norm() > 1.0 + 1e-9 {
            return Err(HbError::OutsideDisk { modulus: z.norm() });
        }
        self.eval_anywhere(z)
    }

    /// Value at any `z` off the poles; used for exterior and radial work.
    pub fn eval_anywhere(&self, z: C64) -> Result<C64> {
        let d = self.den.eval(&z);
        let scale: f64 = self.den.coeffs().iter().map(|c| c.norm()).sum::<f64>() * z.norm().max(1.0).powi(self.den.len() as i32);
        if d.norm() <= 1e-14 * scale {
            return Err(HbError::PoleAt { re: z.re, im: z.im });
        }
        Ok(self.num.eval(&z) / d)
    }

    /// Unchecked quotient, for hot loops on points known to avoid poles.
    #[inline]
    pub fn value(&self, z: C64) -> C64 {
        if self.den.len() == 1 {
            self.num.eval(&z) / self.den.coeff(0)
        } else {
            self.num.eval(&z) / self.den.eval(&z)
        }
    }

    /// Taylor coefficients `0..n`.
    pub fn taylor(&self, n: usize) -> Result<Vec<C64>> {
        if self.boundary_singular {
            return Err(HbError::BoundaryPole);
        }
        let s = CPoly::series_div(&self.num, &self.den, n);
        Ok((0..n).map(|k| s.coeff(k)).collect())
    }

    /// Fourier coefficients with indices in `range` (nonnegative; negative
    /// frequencies of an analytic function vanish).
    pub fn fourier_coeffs(&self, range: std::ops::Range<usize>) -> Result<Vec<C64>> {
        let all = self.taylor(range.end)?;
        Ok(all[range.start.min(range.end)..].to_vec())
    }

    /// Boundary values at the `n` roots of unity. The first grid requested
    /// is cached.
    pub fn samples(&self, n: usize) -> Shared<Vec<C64>> {
        if let Some((m, s)) = self.samples.get() {
            if *m == n {
                return s.clone();
            }
        }
        let s: Shared<Vec<C64>> = Shared::new((0..n).map(|k| self.value(node(n, k))).collect());
        let _ = self.samples.set((n, s.clone()));
        s
    }

    /// Max of `|F|` on the grid.
    pub fn sup_circle(&self, n: usize) -> f64 {
        self.samples(n).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Unimodular zeros of the numerator.
    pub fn circle_zeros(&self, tol: f64) -> Result<Vec<Root>> {
        if self.num.degree().unwrap_or(0) == 0 {
            return Ok(Vec::new());
        }
        Ok(roots::roots(&self.num, 1e-7)?
            .into_iter()
            .filter(|r| (r.value.norm() - 1.0).abs() <= tol)
            .collect())
    }
}

/// Removes numerically common roots of `num` and `den`.
pub fn cancel_common(num: &CPoly, den: &CPoly) -> (CPoly, CPoly) {
    let mut n = num.trim_rel(1e-15);
    let mut d = den.clone();
    if d.degree().unwrap_or(0) == 0 || n.is_zero() {
        return (n, d);
    }
    let Ok(rs) = roots::roots(&d, 1e-7) else { return (n, d) };
    for r in rs {
        for _ in 0..r.multiplicity {
            if n.degree().unwrap_or(0) == 0 {
                break;
            }
            let scale: f64 = n
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| c.norm() * r.value.norm().powi(k as i32))
                .sum();
            if n.eval(&r.value).norm() > 1e-9 * scale {
                break;
            }
            n = n.deflate(&r.value).0;
            d = d.deflate(&r.value).0;
        }
    }
    (n, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qc_real};
    use rand::{Rng, SeedableRng};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn eval_examples() {
        let p = UnitCircleFunction::polynomial(CPoly::from_real(&[0.5, 0.5])).unwrap();
        assert_eq!(p.eval(c(1.0)).unwrap(), c(1.0));
        let m = UnitCircleFunction::polynomial(CPoly::from_real(&[0.5, -0.5])).unwrap();
        assert_eq!(m.eval(c(1.0)).unwrap(), c(0.0));
        let r = UnitCircleFunction::rational(CPoly::one(), CPoly::from_real(&[2.0, 1.0])).unwrap();
        assert!((r.eval(c(0.0)).unwrap() - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn fourier_examples() {
        let p = UnitCircleFunction::polynomial(CPoly::from_real(&[0.5, 0.5])).unwrap();
        assert_eq!(p.fourier_coeffs(0..2).unwrap(), vec![c(0.5), c(0.5)]);
        let r = UnitCircleFunction::rational(CPoly::one(), CPoly::from_real(&[2.0, 1.0])).unwrap();
        let f = r.fourier_coeffs(0..3).unwrap();
        for (x, y) in f.iter().zip([0.5, -0.25, 0.125]) {
            assert!((x - c(y)).norm() < 1e-15);
        }
        let z3 = UnitCircleFunction::polynomial(CPoly::monomial(3)).unwrap();
        assert_eq!(z3.fourier_coeffs(3..4).unwrap(), vec![c(1.0)]);
    }

    #[test]
    fn rejects_interior_and_boundary_poles() {
        let bad = UnitCircleFunction::rational(CPoly::one(), CPoly::from_real(&[0.5, 1.0]));
        assert!(matches!(bad, Err(HbError::PoleAt { .. })));
        let edge = UnitCircleFunction::rational(CPoly::one(), CPoly::from_real(&[1.0, -1.0]));
        assert_eq!(edge.unwrap_err(), HbError::BoundaryPole);
        let ok = UnitCircleFunction::rational_singular(CPoly::one(), CPoly::from_real(&[1.0, -1.0])).unwrap();
        assert!(ok.is_boundary_singular());
        assert_eq!(ok.taylor(3).unwrap_err(), HbError::BoundaryPole);
        assert!(matches!(ok.eval(c(1.0)), Err(HbError::PoleAt { .. })));
    }

    #[test]
    fn common_factors_cancel() {
        // (1-z)/((1-z)(2+z)) = 1/(2+z)
        let num = CPoly::from_real(&[1.0, -1.0]);
        let den = CPoly::from_real(&[2.0, -1.0, -1.0]);
        let f = UnitCircleFunction::rational_singular(num, den).unwrap();
        assert!(!f.is_boundary_singular());
        assert_eq!(f.den().degree(), Some(1));
        let ex = UnitCircleFunction::rational_exact(
            QPoly::new(vec![qc_real(q(1, 1)), qc_real(q(-1, 1))]),
            QPoly::new(vec![qc_real(q(2, 1)), qc_real(q(-1, 1)), qc_real(q(-1, 1))]),
        )
        .unwrap();
        let (n, d) = ex.exact().unwrap();
        assert_eq!(n.degree(), Some(0));
        assert_eq!(d.coeff(0), qc_real(q(1, 1)));
        assert_eq!(d.coeff(1), qc_real(q(1, 2)));
    }

    #[test]
    fn blaschke_is_unimodular() {
        let b = UnitCircleFunction::blaschke(vec![C64::new(0.3, -0.4), c(0.5)], C64::new(0.0, 1.0)).unwrap();
        assert!(b.samples(256).iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
        assert!(UnitCircleFunction::blaschke(vec![c(1.0)], c(1.0)).is_err());
    }

    #[test]
    fn coefficients_round_trip_eval() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let f = UnitCircleFunction::rational(CPoly::from_real(&[1.0, -0.3, 0.2]), CPoly::from_real(&[3.0, 1.0])).unwrap();
        let t = f.taylor(80).unwrap();
        let p = CPoly::new(t);
        for _ in 0..64 {
            let z = C64::from_polar(rng.random::<f64>() * 0.7, rng.random::<f64>() * TAU);
            assert!((p.eval(&z) - f.eval(z).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn sample_cache() {
        let f = UnitCircleFunction::polynomial(CPoly::from_real(&[1.0, 1.0])).unwrap();
        let a = f.samples(256);
        let b = f.samples(256);
        assert!(Shared::ptr_eq(&a, &b));
        assert_eq!(f.samples(512).len(), 512);
    }
}
