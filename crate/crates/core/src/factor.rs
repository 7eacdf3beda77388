//! Spectral factorization of nonnegative trigonometric polynomials, the
//! Pythagorean mate of a rational `b`, outer tests and inner-outer splitting.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::boundary::{node, roots, UnitCircleFunction};
use crate::config::Config;
use crate::error::{HbError, Result};
use crate::poly::{CPoly, QPoly, TrigPoly};
use crate::scalar::{qc_approx, rational_approx, rational_sqrt, C64, QC};

/// Largest denominator tried when reconstructing exact mate coefficients.
const MAX_DEN: i64 = 1 << 24;

/// Outer polynomial `a` with `|a|^2 = w` on the circle and `a(0) > 0`.
pub fn fejer_riesz(w: &TrigPoly<C64>, cfg: &Config) -> Result<CPoly> {
    let scale = w.max_abs();
    if scale == 0.0 {
        return Err(HbError::ZeroPolynomial);
    }
    let d = w.degree() as i64;
    for k in 0..=d {
        if (w.coeff(-k) - w.coeff(k).conj()).norm() > 1e-12 * scale {
            return Err(HbError::NotHermitian);
        }
    }
    let n = cfg.grid.n.max(16 * (d as usize + 1)).next_power_of_two();
    let vals: Vec<f64> = (0..n).map(|k| w.eval_circle(node(n, k)).re).collect();
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-12 * scale.max(1.0) {
        return Err(HbError::NegativeWeight { min });
    }
    if d == 0 {
        return Ok(CPoly::constant(C64::new(w.coeff(0).re.max(0.0).sqrt(), 0.0)));
    }
    let lift = w.laurent_lift();
    let rs = roots::roots(&lift, cfg.root_cluster_tol)?;
    let tol = cfg.pairing_tol;
    let mut outside: Vec<C64> = Vec::new();
    let mut inside: Vec<C64> = Vec::new();
    let mut circle: Vec<C64> = Vec::new();
    for r in &rs {
        let m = r.value.norm();
        if (m - 1.0).abs() <= tol {
            if r.multiplicity % 2 == 1 {
                return Err(HbError::OddCircleMultiplicity {
                    angle: crate::boundary::angle_of(r.value),
                    multiplicity: r.multiplicity,
                });
            }
            let z = r.value / m;
            circle.extend(std::iter::repeat_n(z, r.multiplicity / 2));
        } else if m > 1.0 {
            outside.extend(std::iter::repeat_n(r.value, r.multiplicity));
        } else {
            inside.extend(std::iter::repeat_n(r.value, r.multiplicity));
        }
    }
    // Every exterior root must have its reflection inside.
    if outside.len() != inside.len() {
        let r = outside.first().or(inside.first()).copied().unwrap_or_default();
        return Err(HbError::PairingMismatch { re: r.re, im: r.im });
    }
    let mut used = vec![false; inside.len()];
    for r in &outside {
        let target = C64::new(1.0, 0.0) / r.conj();
        let best = inside
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .min_by(|x, y| (x.1 - target).norm().partial_cmp(&(y.1 - target).norm()).unwrap());
        match best {
            Some((i, s)) if (s - target).norm() <= tol * target.norm().max(1.0) => used[i] = true,
            _ => return Err(HbError::PairingMismatch { re: r.re, im: r.im }),
        }
    }
    let mut all = outside;
    all.extend(circle);
    let p = CPoly::from_roots(C64::new(1.0, 0.0), &all);
    // |c|^2 by least squares against w on the grid.
    let (mut num, mut den) = (0.0, 0.0);
    for (k, wv) in vals.iter().enumerate() {
        let pv = p.eval(&node(n, k)).norm_sqr();
        num += wv * pv;
        den += pv * pv;
    }
    let c_abs = (num / den).max(0.0).sqrt();
    let p0 = p.coeff(0);
    let a = p.scale(&(p0.conj() / p0.norm() * c_abs));
    let resid = (0..n)
        .map(|k| (a.eval(&node(n, k)).norm_sqr() - vals[k]).abs())
        .fold(0.0, f64::max);
    if resid > 1e-8 * scale.max(1.0) {
        return Err(HbError::RefitResidual { residual: resid });
    }
    Ok(a)
}

/// Exact description `a = sqrt(r) * unit / den` of a mate, with `unit(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMate {
    pub r: BigRational,
    pub unit: QPoly,
    pub den: QPoly,
}

impl ExactMate {
    /// `sqrt(r)` when `r` is a perfect square.
    pub fn sqrt_r(&self) -> Option<BigRational> {
        rational_sqrt(&self.r)
    }

    /// Exact numerator of `a` when `r` is a perfect square.
    pub fn numerator(&self) -> Option<QPoly> {
        let s = self.sqrt_r()?;
        Some(self.unit.scale(&QC::new(s, BigRational::zero())))
    }

    pub fn to_c64_numerator(&self) -> CPoly {
        let s = crate::scalar::ratio_to_f64(&self.r).sqrt();
        self.unit.to_c64().scale(&C64::new(s, 0.0))
    }
}

/// Pythagorean mate of `b` as a rational function sharing `b`'s denominator.
pub fn mate_of_b(b: &UnitCircleFunction, cfg: &Config) -> Result<UnitCircleFunction> {
    Ok(mate_with_exact(b, cfg)?.0)
}

/// Mate plus, when `b` carries exact data and the factorization is
/// recognizably rational, its exact description.
pub fn mate_with_exact(b: &UnitCircleFunction, cfg: &Config) -> Result<(UnitCircleFunction, Option<ExactMate>)> {
    if b.is_constant() {
        return Err(HbError::Constant);
    }
    if b.is_boundary_singular() {
        return Err(HbError::BoundaryPole);
    }
    let sup = b.sup_circle(cfg.grid.n);
    if sup > 1.0 + 1e-12 {
        return Err(HbError::NotContractive { sup });
    }
    let (p, q) = (b.num(), b.den());
    let w = &q.abs_sq_trig() - &p.abs_sq_trig();
    let scale = q.abs_sq_trig().max_abs();
    if w.max_abs() <= 1e-12 * scale {
        return Err(HbError::ExtremeSymbol);
    }
    let a_num = fejer_riesz(&w, cfg).map_err(|e| match e {
        HbError::ZeroPolynomial => HbError::ExtremeSymbol,
        other => other,
    })?;
    let exact = b.exact().and_then(|(pe, qe)| reconstruct_exact(&a_num, pe, qe));
    let exact_num = exact.as_ref().and_then(ExactMate::numerator);
    let a = UnitCircleFunction::rational(a_num, q.clone())?;
    let a = match (exact_num, &exact) {
        (Some(n), Some(em)) => a.with_exact(Some((n, em.den.clone()))),
        _ => a,
    };
    Ok((a, exact))
}

/// Recovers `a = sqrt(r) unit / q` exactly from a float numerator and checks
/// `r |unit|^2 = |q|^2 - |p|^2` in exact arithmetic.
pub fn reconstruct_exact(a_num: &CPoly, p: &QPoly, q: &QPoly) -> Option<ExactMate> {
    let a0 = a_num.coeff(0);
    if a0.norm() == 0.0 {
        return None;
    }
    let r = rational_approx(a0.norm_sqr(), 1e-10, MAX_DEN)?;
    let unit = QPoly::new(
        a_num.coeffs().iter().map(|c| qc_approx(c / a0, 1e-9, MAX_DEN)).collect::<Option<Vec<_>>>()?,
    );
    let em = ExactMate { r, unit, den: q.clone() };
    pythagorean_exact(&em, p).then_some(em)
}

/// Exact check of `|p|^2 + r |unit|^2 = |q|^2`.
pub fn pythagorean_exact(em: &ExactMate, p: &QPoly) -> bool {
    let rq = QC::new(em.r.clone(), BigRational::zero());
    let lhs = &p.abs_sq_trig() + &scale_trig(&em.unit.abs_sq_trig(), &rq);
    let rhs = em.den.abs_sq_trig();
    (&lhs - &rhs).is_zero()
}

fn scale_trig(t: &TrigPoly<QC>, s: &QC) -> TrigPoly<QC> {
    TrigPoly::from_symmetric(t.coeffs().iter().map(|c| c.clone() * s.clone()).collect()).unwrap()
}

/// Grid maximum of `||a|^2 + |b|^2 - 1|`.
pub fn pythagorean_residual(a: &UnitCircleFunction, b: &UnitCircleFunction, n: usize) -> f64 {
    let (sa, sb) = (a.samples(n), b.samples(n));
    sa.iter().zip(sb.iter()).map(|(x, y)| (x.norm_sqr() + y.norm_sqr() - 1.0).abs()).fold(0.0, f64::max)
}

/// No roots strictly inside the disk (circle roots allowed).
pub fn is_outer(f: &CPoly) -> Result<bool> {
    let f = f.trim_rel(1e-15);
    if f.is_zero() {
        return Err(HbError::ZeroPolynomial);
    }
    if f.degree() == Some(0) {
        return Ok(true);
    }
    Ok(roots::roots(&f, 1e-7)?.iter().all(|r| r.value.norm() >= 1.0 - 1e-10))
}

/// `f = theta * F` with `theta` a finite Blaschke product over the interior
/// roots and `F` an outer polynomial with `F(0) > 0`.
#[derive(Debug, Clone)]
pub struct InnerOuter {
    pub theta: UnitCircleFunction,
    pub outer: CPoly,
}

#[derive(Debug, Clone, Serialize)]
pub struct InnerOuterSummary {
    pub interior_zeros: Vec<C64>,
    pub phase: C64,
    pub outer: Vec<C64>,
}

impl InnerOuter {
    pub fn summary(&self) -> InnerOuterSummary {
        InnerOuterSummary {
            interior_zeros: self.theta.blaschke_zeros().to_vec(),
            phase: self.theta.blaschke_phase(),
            outer: self.outer.coeffs().to_vec(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.theta.blaschke_zeros().is_empty()
    }
}

pub fn inner_outer(f: &CPoly) -> Result<InnerOuter> {
    let f = f.trim_rel(1e-15);
    if f.is_zero() {
        return Err(HbError::ZeroPolynomial);
    }
    let mut interior = Vec::new();
    let mut rest = f.clone();
    if f.degree().unwrap_or(0) > 0 {
        for r in roots::roots(&f, 1e-7)? {
            if r.value.norm() < 1.0 - 1e-10 {
                for _ in 0..r.multiplicity {
                    interior.push(r.value);
                    rest = rest.deflate(&r.value).0;
                }
            }
        }
    }
    let one = C64::new(1.0, 0.0);
    let mut outer = rest;
    for r in &interior {
        outer = &outer * &CPoly::new(vec![one, -r.conj()]);
    }
    let f0 = outer.coeff(0);
    let phase = f0 / f0.norm();
    let outer = outer.scale(&phase.inv());
    let theta = UnitCircleFunction::blaschke(interior, phase)?;
    Ok(InnerOuter { theta, outer })
}

/// Whether `p` has a Gaussian-rational copy that matches to `tol`.
pub fn exact_copy(p: &CPoly, tol: f64) -> Option<QPoly> {
    let q = QPoly::new(p.coeffs().iter().map(|c| qc_approx(*c, tol, MAX_DEN)).collect::<Option<Vec<_>>>()?);
    (q.to_c64().max_diff(p) <= tol).then_some(q)
}
