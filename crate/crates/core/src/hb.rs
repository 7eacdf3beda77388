//! `H(b)` for rational non-extreme `b`: mates through the Toeplitz relation
//! `T_{conj b} f + T_{conj a} f1 = 0`, inner products, reproducing kernels.

use std::sync::atomic::{AtomicU64, Ordering};

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::boundary::{roots, UnitCircleFunction};
use crate::config::Config;
use crate::error::{HbError, Result};
use crate::factor::{self, ExactMate, InnerOuter};
use crate::par;
use crate::poly::{CPoly, Poly, QPoly};
use crate::scalar::{ratio_to_f64, Scalar, C64, QC};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Tail bound targeted by Taylor truncations of rational elements.
pub const TAYLOR_TOL: f64 = 1e-12;
const MAX_TAYLOR: usize = 4096;

/// Exact data of a space: `b = p/q`, `a = sqrt(r) unit / q`.
#[derive(Debug, Clone)]
pub struct ExactSpace {
    pub p: QPoly,
    pub q: QPoly,
    pub mate: ExactMate,
}

#[derive(Debug, Clone)]
pub struct HbSpace {
    id: u64,
    b: UnitCircleFunction,
    a: UnitCircleFunction,
    cfg: Config,
    exact: Option<ExactSpace>,
}

/// `f` with its mate `f1`; `norm_sq = |f|_2^2 + |f1|_2^2`.
#[derive(Debug, Clone)]
pub struct HbElement {
    space: u64,
    f: CPoly,
    f1: CPoly,
    norm_sq: f64,
    residual: f64,
    exact: Option<ExactElement>,
}

/// Exact element data. `scaled = sqrt(r) f1` is rational even when `f1`
/// is not.
#[derive(Debug, Clone)]
pub struct ExactElement {
    pub f: QPoly,
    pub scaled: QPoly,
    pub norm_sq: BigRational,
}

/// Coefficients `c` of the unique polynomial solving
/// `P_+(conj(p) f + conj(a) c) = 0`, by back substitution from the top.
pub fn mate_coeffs<T: Scalar>(p: &Poly<T>, a: &Poly<T>, f: &Poly<T>) -> Poly<T> {
    let Some(df) = f.degree() else { return Poly::zero() };
    let q: Vec<T> = (0..=df)
        .map(|m| {
            let mut s = T::zero();
            for (j, pj) in p.coeffs().iter().enumerate() {
                if m + j > df {
                    break;
                }
                s = s + pj.conj() * f.coeff(m + j);
            }
            -s
        })
        .collect();
    let a0 = a.coeff(0).conj();
    let mut c = vec![T::zero(); df + 1];
    for m in (0..=df).rev() {
        let mut s = q[m].clone();
        for j in 1..a.len() {
            if m + j > df {
                break;
            }
            s = s - a.coeff(j).conj() * c[m + j].clone();
        }
        c[m] = s / a0.clone();
    }
    Poly::new(c)
}

/// Largest coefficient of `P_+(conj(p) f + conj(a) c)`.
pub fn mate_residual(p: &CPoly, a: &CPoly, f: &CPoly, c: &CPoly) -> f64 {
    let n = f.len().max(c.len());
    (0..n)
        .map(|m| {
            let mut s = C64::new(0.0, 0.0);
            for (j, pj) in p.coeffs().iter().enumerate() {
                s += pj.conj() * f.coeff(m + j);
            }
            for (j, aj) in a.coeffs().iter().enumerate() {
                s += aj.conj() * c.coeff(m + j);
            }
            s.norm()
        })
        .fold(0.0, f64::max)
}

impl HbSpace {
    /// Validates `b` and computes its mate.
    pub fn new(b: UnitCircleFunction, cfg: Config) -> Result<Self> {
        cfg.grid.validate()?;
        if b.is_boundary_singular() {
            return Err(HbError::BoundaryPole);
        }
        let (a, mate) = factor::mate_with_exact(&b, &cfg)?;
        let exact = match (b.exact(), mate) {
            (Some((p, q)), Some(m)) => Some(ExactSpace { p: p.clone(), q: q.clone(), mate: m }),
            _ => None,
        };
        Ok(HbSpace { id: NEXT_ID.fetch_add(1, Ordering::Relaxed), b, a, cfg, exact })
    }

    /// The space whose normalized Clark data at `alpha = 1` has density
    /// `|phi|^2`: with `H = 1 + 2 sum_k w_k z^k` for `w = |phi|^2`
    /// (normalized), `b = (H - 1)/(H + 1)` and `a = 2 phi/(H + 1)`.
    pub fn from_phi(phi: &UnitCircleFunction, cfg: Config) -> Result<Self> {
        let Some(p) = phi.as_polynomial() else { return Err(HbError::NotPolynomial) };
        if !factor::is_outer(p)? {
            let r = roots::roots(p, 1e-7)?.into_iter().find(|r| r.value.norm() < 1.0 - 1e-10).unwrap();
            return Err(HbError::NotOuter { re: r.value.re, im: r.value.im });
        }
        if p.degree() == Some(0) {
            return Err(HbError::Constant);
        }
        let b = match phi.exact_polynomial() {
            Some(pe) => {
                let (num, den) = herglotz_from_phi(pe);
                UnitCircleFunction::rational_exact(num, den)?
            }
            None => {
                let (num, den) = herglotz_from_phi(p);
                UnitCircleFunction::rational(num, den)?
            }
        };
        Self::new(b, cfg)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn b(&self) -> &UnitCircleFunction {
        &self.b
    }

    pub fn a(&self) -> &UnitCircleFunction {
        &self.a
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    pub fn exact(&self) -> Option<&ExactSpace> {
        self.exact.as_ref()
    }

    /// `b = p/q`, numerator.
    pub fn p(&self) -> &CPoly {
        self.b.num()
    }

    /// Shared denominator of `b` and `a`.
    pub fn q(&self) -> &CPoly {
        self.b.den()
    }

    /// Numerator of `a`.
    pub fn a_num(&self) -> &CPoly {
        self.a.num()
    }

    /// Element for a polynomial `f`.
    pub fn element(&self, f: &CPoly) -> HbElement {
        let f = f.clone();
        let f1 = mate_coeffs(self.p(), self.a_num(), &f);
        let residual = mate_residual(self.p(), self.a_num(), &f, &f1);
        let norm_sq = f.norm_sq_f64() + f1.norm_sq_f64();
        let exact = self.exact.as_ref().and_then(|ex| {
            let fe = factor::exact_copy(&f, 0.0)?;
            Some(exact_element(ex, fe))
        });
        HbElement { space: self.id, f, f1, norm_sq, residual, exact }
    }

    /// Element for an exact polynomial, computed in Gaussian rationals.
    pub fn element_exact(&self, f: &QPoly) -> Result<HbElement> {
        let ex = self.exact.as_ref().ok_or_else(|| HbError::ExactUnavailable {
            reason: "mate is not recognizably rational".into(),
        })?;
        let e = exact_element(ex, f.clone());
        let s = ratio_to_f64(&ex.mate.r).sqrt();
        let f1 = e.scaled.to_c64().scale(&C64::new(1.0 / s, 0.0));
        let fc = f.to_c64();
        Ok(HbElement {
            space: self.id,
            residual: mate_residual(self.p(), self.a_num(), &fc, &f1),
            norm_sq: ratio_to_f64(&e.norm_sq),
            f: fc,
            f1,
            exact: Some(e),
        })
    }

    /// Element for a rational function analytic across the circle, through
    /// its Taylor polynomial with tail below [`TAYLOR_TOL`].
    pub fn element_from_function(&self, g: &UnitCircleFunction) -> Result<HbElement> {
        if let Some(p) = g.as_polynomial() {
            return Ok(self.element(p));
        }
        let n = truncation_degree(g)?;
        Ok(self.element(&CPoly::new(g.taylor(n)?)))
    }

    fn check(&self, e: &HbElement) -> Result<()> {
        if e.space == self.id {
            Ok(())
        } else {
            Err(HbError::SpaceMismatch)
        }
    }

    /// `<f, g>_b = <f, g>_2 + <f1, g1>_2`, linear in `f`.
    pub fn inner_product(&self, f: &HbElement, g: &HbElement) -> Result<C64> {
        self.check(f)?;
        self.check(g)?;
        Ok(f.f.inner(&g.f) + f.f1.inner(&g.f1))
    }

    pub fn inner_product_exact(&self, f: &HbElement, g: &HbElement) -> Result<QC> {
        self.check(f)?;
        self.check(g)?;
        let ex = self.exact.as_ref().ok_or_else(|| HbError::ExactUnavailable { reason: "no exact mate".into() })?;
        let (Some(fe), Some(ge)) = (&f.exact, &g.exact) else {
            return Err(HbError::ExactUnavailable { reason: "element has no exact data".into() });
        };
        let r = QC::new(ex.mate.r.clone(), BigRational::zero());
        Ok(fe.f.inner(&ge.f) + fe.scaled.inner(&ge.scaled) / r)
    }

    /// Gram matrix `G[j][k] = <e_j, e_k>_b`.
    pub fn gram(&self, es: &[HbElement]) -> Result<Vec<Vec<C64>>> {
        for e in es {
            self.check(e)?;
        }
        let n = es.len();
        let flat = par::map_range(self.cfg.exec, n * n, |idx| {
            let (j, k) = (idx / n, idx % n);
            es[j].f.inner(&es[k].f) + es[j].f1.inner(&es[k].f1)
        });
        Ok(flat.chunks(n.max(1)).map(<[C64]>::to_vec).collect())
    }

    /// `k_lambda(z) = (1 - conj(b(lambda)) b(z)) / (1 - conj(lambda) z)`.
    pub fn kernel(&self, lambda: C64) -> Result<UnitCircleFunction> {
        if lambda.norm() >= 1.0 {
            return Err(HbError::OutsideDisk { modulus: lambda.norm() });
        }
        let bl = self.b.eval(lambda)?;
        let num = self.q() - &self.p().scale(&bl.conj());
        let den = self.q() * &CPoly::new(vec![C64::new(1.0, 0.0), -lambda.conj()]);
        UnitCircleFunction::rational(num, den)
    }

    pub fn kernel_element(&self, lambda: C64) -> Result<HbElement> {
        self.element_from_function(&self.kernel(lambda)?)
    }

    /// `k_lambda(lambda) = (1 - |b(lambda)|^2) / (1 - |lambda|^2)`.
    pub fn kernel_diagonal(&self, lambda: C64) -> Result<f64> {
        if lambda.norm() >= 1.0 {
            return Err(HbError::OutsideDisk { modulus: lambda.norm() });
        }
        Ok((1.0 - self.b.eval(lambda)?.norm_sqr()) / (1.0 - lambda.norm_sqr()))
    }

    /// Boundary kernel at a point `zeta` with `|b(zeta)| = 1`, where the
    /// difference quotient cancels and the kernel stays rational.
    pub fn boundary_kernel(&self, zeta: C64) -> Result<UnitCircleFunction> {
        if (zeta.norm() - 1.0).abs() > 1e-12 {
            return Err(HbError::NotUnimodular { modulus: zeta.norm() });
        }
        let bz = self.b.eval(zeta)?;
        if (bz.norm() - 1.0).abs() > 1e-9 {
            return Err(HbError::NotUnimodular { modulus: bz.norm() });
        }
        let num = self.q() - &self.p().scale(&bz.conj());
        let (quot, rem) = num.deflate(&zeta);
        if rem.norm() > 1e-9 * num.max_abs().max(1.0) {
            return Err(HbError::Numerical { reason: "boundary kernel numerator does not vanish".into() });
        }
        // 1 - conj(zeta) z = -conj(zeta) (z - zeta)
        UnitCircleFunction::rational(quot.scale(&(-zeta)), self.q().clone())
    }

    /// Replaces `f` by `f / theta` for its inner factor `theta`.
    pub fn divide_inner(&self, f: &HbElement) -> Result<(HbElement, InnerOuter)> {
        self.check(f)?;
        let io = factor::inner_outer(&f.f)?;
        if io.is_trivial() {
            return Ok((f.clone(), io));
        }
        Ok((self.element(&io.outer), io))
    }

    /// Summary of the non-extreme check.
    pub fn validation(&self) -> Validation {
        let n = self.cfg.grid.n;
        let circle_zeros_of_a = self
            .a
            .circle_zeros(self.cfg.circle_tol.max(1e-6))
            .map(|v| v.into_iter().map(|r| r.value).collect())
            .unwrap_or_default();
        Validation {
            sup_b: self.b.sup_circle(n),
            pythagorean_residual: factor::pythagorean_residual(&self.a, &self.b, n),
            exact_identity: self.exact.as_ref().map(|ex| factor::pythagorean_exact(&ex.mate, &ex.p)),
            a_numerator: self.a_num().coeffs().to_vec(),
            denominator: self.q().coeffs().to_vec(),
            circle_zeros_of_a,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Validation {
    pub sup_b: f64,
    pub pythagorean_residual: f64,
    pub exact_identity: Option<bool>,
    pub a_numerator: Vec<C64>,
    pub denominator: Vec<C64>,
    pub circle_zeros_of_a: Vec<C64>,
}

fn exact_element(ex: &ExactSpace, f: QPoly) -> ExactElement {
    let scaled = mate_coeffs(&ex.p, &ex.mate.unit, &f);
    let nf = f.norm_sq().re;
    let nc = scaled.norm_sq().re;
    ExactElement { norm_sq: nf + nc / ex.mate.r.clone(), f, scaled }
}

/// `(H - 1, H + 1)` for `H = 1 + 2 sum_{k>=1} w_k z^k`, `w = |phi|^2 / |phi|_2^2`.
fn herglotz_from_phi<T: Scalar>(phi: &Poly<T>) -> (Poly<T>, Poly<T>) {
    let w = phi.abs_sq_trig();
    let d = w.degree();
    let norm = w.coeff(0);
    let two = T::from_i64(2);
    let mut h: Vec<T> = vec![T::one()];
    for k in 1..=d as i64 {
        h.push(two.clone() * w.coeff(k) / norm.clone());
    }
    let h = Poly::new(h);
    (&h - &Poly::one(), &h + &Poly::one())
}

/// Taylor length with geometric tail below [`TAYLOR_TOL`].
pub fn truncation_degree(g: &UnitCircleFunction) -> Result<usize> {
    if g.is_polynomial() {
        return Ok(g.num().len());
    }
    let rmin = roots::roots(g.den(), 1e-7)?
        .iter()
        .map(|r| r.value.norm())
        .fold(f64::INFINITY, f64::min);
    if rmin <= 1.0 {
        return Err(HbError::BoundaryPole);
    }
    let rho = 1.0 / rmin;
    let mut n = ((TAYLOR_TOL * (1.0 - rho)).ln() / rho.ln()).ceil() as usize + 8;
    n = n.clamp(16, MAX_TAYLOR);
    // Extend until the computed tail is actually small.
    loop {
        let t = g.taylor(n)?;
        let tail = t[n - 1].norm() / (1.0 - rho);
        if tail < TAYLOR_TOL || n >= MAX_TAYLOR {
            return Ok(n);
        }
        n = (n * 2).min(MAX_TAYLOR);
    }
}

impl HbElement {
    pub fn poly(&self) -> &CPoly {
        &self.f
    }

    pub fn mate(&self) -> &CPoly {
        &self.f1
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// Largest coefficient of the Toeplitz-relation residual.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn exact(&self) -> Option<&ExactElement> {
        self.exact.as_ref()
    }

    pub fn exact_norm_sq(&self) -> Option<&BigRational> {
        self.exact.as_ref().map(|e| &e.norm_sq)
    }
}
