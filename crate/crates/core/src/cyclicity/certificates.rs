//! Sufficient conditions for cyclicity: an arc split of the circle, a local
//! lower bound around the non-exposure set, and the spectrum-disjointness
//! test for outer parts of `V g`.
//!
//! Every essential-infimum claim is made sound for rational data by a zero
//! location argument; grid minima are reported as diagnostics.

use std::f64::consts::TAU;

use serde::Serialize;
use serde_json::json;

use crate::boundary::{angle_of, covers_circle, node, roots, uncovered_length, Arc, UnitCircleFunction};
use crate::clark::{clark_measure, normalized_cauchy, normalized_cauchy_poly};
use crate::error::{HbError, Result};
use crate::factor::{inner_outer, is_outer};
use crate::hb::HbSpace;
use crate::par;
use crate::poly::CPoly;
use crate::scalar::C64;
use crate::sigma::{sigma_upper, SigmaPoint};

use super::classify::boundary_points;
use super::{Evidence, Verdict};

const ARC_SAMPLES: usize = 4096;
/// Angular slack when testing closures of arcs.
const CLOSURE_TOL: f64 = 1e-9;
const NORMALIZATION_TOL: f64 = 1e-6;
const REFIT_TOL: f64 = 1e-8;
const SEPARATION_TOL: f64 = 1e-6;

fn fail(rule: &str, reason: impl Into<String>) -> HbError {
    HbError::CertificateFailed { rule: rule.into(), reason: reason.into() }
}

/// Angles of the unimodular roots of a polynomial.
fn circle_root_angles(f: &CPoly) -> Result<Vec<f64>> {
    let f = f.trim_rel(1e-15);
    if f.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    Ok(roots::roots(&f, 1e-7)?
        .into_iter()
        .filter(|r| (r.value.norm() - 1.0).abs() <= 1e-6)
        .map(|r| angle_of(r.value))
        .collect())
}

fn require_outer(rule: &str, f: &CPoly) -> Result<()> {
    if is_outer(f)? {
        Ok(())
    } else {
        Err(fail(rule, "f is not outer"))
    }
}

fn grid_min(f: &CPoly, arc: &Arc) -> f64 {
    arc.sample(ARC_SAMPLES)
        .into_iter()
        .map(|t| f.eval(&C64::from_polar(1.0, t)).norm())
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremACertificate {
    pub e: Vec<Arc>,
    pub f: Vec<Arc>,
    /// `int_E |a|^-2 dm` with normalized arclength.
    pub inv_a_sq_integral: f64,
    /// Grid minimum of `|f|` over `F` (diagnostic).
    pub f_grid_min: Option<f64>,
    pub boundary_points: Vec<f64>,
    pub uncovered: f64,
}

impl TheoremACertificate {
    pub fn evidence(&self, f: &CPoly) -> Evidence {
        Evidence {
            rule: "arc_split_certificate".into(),
            basis: "f outer with 1/a square-integrable on E and 1/f essentially bounded on F, where E and F cover the circle, is cyclic".into(),
            verdict: Verdict::Cyclic,
            inputs: json!({ "f": f.coeffs(), "E": self.e, "F": self.f }),
            numbers: json!({
                "inv_a_sq_integral": self.inv_a_sq_integral,
                "f_grid_min": self.f_grid_min,
                "boundary_points": self.boundary_points,
                "uncovered": self.uncovered,
            }),
        }
    }
}

/// Arc-split certificate: `E` and `F` cover the circle, `a` has no
/// unimodular zero in the closure of `E`, and `f` none in the closure of `F`.
pub fn theorem_a_check(space: &HbSpace, f: &CPoly, e: &[Arc], f_arcs: &[Arc]) -> Result<TheoremACertificate> {
    const RULE: &str = "A";
    require_outer(RULE, f)?;
    let all: Vec<Arc> = e.iter().chain(f_arcs).copied().collect();
    let uncovered = uncovered_length(&all);
    if !covers_circle(&all, 1e-12) {
        return Err(fail(RULE, format!("E and F leave a gap of length {uncovered:e}")));
    }
    let lambdas: Vec<f64> = boundary_points(space)?.into_iter().map(angle_of).collect();
    if let Some(t) = lambdas.iter().find(|t| e.iter().any(|a| a.contains(**t, CLOSURE_TOL))) {
        return Err(fail(RULE, format!("zero of a at angle {t} lies in the closure of E")));
    }
    if let Some(t) = circle_root_angles(f)?.into_iter().find(|t| f_arcs.iter().any(|a| a.contains(*t, CLOSURE_TOL))) {
        return Err(fail(RULE, format!("zero of f at angle {t} lies in the closure of F")));
    }
    let a = space.a();
    let exec = space.config().exec;
    let inv_a_sq_integral: f64 = e
        .iter()
        .map(|arc| {
            let ts = arc.sample(ARC_SAMPLES + 1);
            let h = arc.span() / ARC_SAMPLES as f64;
            let vals = par::map_slice(exec, &ts, |&t| 1.0 / a.value(C64::from_polar(1.0, t)).norm_sqr());
            let s: f64 = vals.iter().sum::<f64>() - 0.5 * (vals[0] + vals[vals.len() - 1]);
            s * h / TAU
        })
        .sum();
    let f_grid_min = f_arcs.iter().map(|arc| grid_min(f, arc)).reduce(f64::min);
    Ok(TheoremACertificate { e: e.to_vec(), f: f_arcs.to_vec(), inv_a_sq_integral, f_grid_min, boundary_points: lambdas, uncovered })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverItem {
    pub arc: Arc,
    pub eta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremBCertificate {
    pub cover: Vec<CoverItem>,
    pub sigma_upper: Vec<SigmaPoint>,
    pub grid_mins: Vec<f64>,
    pub phi_norm_sq: f64,
}

impl TheoremBCertificate {
    pub fn evidence(&self, f: &CPoly) -> Evidence {
        Evidence {
            rule: "local_bound_certificate".into(),
            basis: "f outer and bounded below near every point of sigma(phi), in a normalized space, is cyclic".into(),
            verdict: Verdict::Cyclic,
            inputs: json!({ "f": f.coeffs(), "cover": self.cover }),
            numbers: json!({
                "sigma_upper": self.sigma_upper,
                "grid_mins": self.grid_mins,
                "phi_norm_sq": self.phi_norm_sq,
            }),
        }
    }
}

/// `phi = a/(1 - b)` after checking that `mu_1` is absolutely continuous
/// with unit mass.
fn normalized_phi(space: &HbSpace) -> Result<(UnitCircleFunction, f64)> {
    let mu = clark_measure(space, C64::new(1.0, 0.0))?;
    if !mu.is_absolutely_continuous() {
        return Err(HbError::Normalization { reason: format!("mu_1 has {} atom(s)", mu.atoms.len()) });
    }
    if (mu.ac_mass - 1.0).abs() > NORMALIZATION_TOL {
        return Err(HbError::Normalization { reason: format!("|phi|^2 integrates to {}", mu.ac_mass) });
    }
    Ok((mu.phi, mu.ac_mass))
}

pub fn theorem_b_check(space: &HbSpace, f: &CPoly, cover: &[CoverItem]) -> Result<TheoremBCertificate> {
    const RULE: &str = "B";
    let (phi, phi_norm_sq) = normalized_phi(space)?;
    require_outer(RULE, f)?;
    let upper = sigma_upper(&phi)?;
    for p in &upper {
        if !cover.iter().any(|c| c.arc.contains_interior(p.theta, CLOSURE_TOL)) {
            return Err(fail(RULE, format!("point at angle {} is not inside any arc", p.theta)));
        }
    }
    let zeros = circle_root_angles(f)?;
    let mut grid_mins = Vec::with_capacity(cover.len());
    for c in cover {
        if !(c.eta > 0.0) {
            return Err(fail(RULE, format!("bound {} is not positive", c.eta)));
        }
        if let Some(t) = zeros.iter().find(|t| c.arc.contains(**t, CLOSURE_TOL)) {
            return Err(fail(RULE, format!("zero of f at angle {t} lies in a cover arc")));
        }
        let m = grid_min(f, &c.arc);
        if m <= c.eta {
            return Err(fail(RULE, format!("grid minimum {m} does not exceed bound {}", c.eta)));
        }
        grid_mins.push(m);
    }
    Ok(TheoremBCertificate { cover: cover.to_vec(), sigma_upper: upper, grid_mins, phi_norm_sq })
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremCCertificate {
    /// Numerator of `V g` over the denominator of `b`.
    pub vg_numerator: Vec<C64>,
    pub interior_zeros: Vec<C64>,
    /// Numerator of the outer part `F`.
    pub outer_numerator: Vec<C64>,
    pub sigma_upper_outer: Vec<SigmaPoint>,
    pub sigma_upper_phi: Vec<SigmaPoint>,
    pub refit_residual: f64,
    pub outer_norm_sq: f64,
    /// Change of the norm of `F` between two Taylor truncations.
    pub norm_drift: f64,
}

impl TheoremCCertificate {
    pub fn evidence(&self, g: &CPoly) -> Evidence {
        Evidence {
            rule: "spectrum_disjointness_certificate".into(),
            basis: "the outer part F of V g for bounded g is cyclic whenever sigma(F) and sigma(phi) are disjoint".into(),
            verdict: Verdict::Cyclic,
            inputs: json!({ "g": g.coeffs() }),
            numbers: json!({
                "outer_numerator": self.outer_numerator,
                "sigma_upper_outer": self.sigma_upper_outer,
                "sigma_upper_phi": self.sigma_upper_phi,
                "refit_residual": self.refit_residual,
                "outer_norm_sq": self.outer_norm_sq,
                "norm_drift": self.norm_drift,
            }),
        }
    }
}

/// Result of the spectrum-disjointness route: the outer part `F` of `V g`
/// always, and either a certificate or the reason it failed.
#[derive(Debug, Clone)]
pub struct TheoremCOutcome {
    pub outer: UnitCircleFunction,
    pub certificate: std::result::Result<TheoremCCertificate, HbError>,
}

pub fn theorem_c_check(space: &HbSpace, g: &CPoly) -> Result<TheoremCOutcome> {
    const RULE: &str = "C";
    let one = C64::new(1.0, 0.0);
    let (phi, _) = normalized_phi(space)?;
    if g.trim_rel(1e-15).is_zero() {
        return Err(HbError::ZeroPolynomial);
    }
    let vg = normalized_cauchy_poly(space, one, g)?;
    // Cross-check the closed form against quadrature at interior points.
    let mu = clark_measure(space, one)?;
    let mut refit_residual: f64 = 0.0;
    for k in 0..8 {
        let z = node(8, k) * 0.5;
        let quad = normalized_cauchy(space, &mu, |w| g.eval(&w), z)?;
        let scale = quad.norm().max(1.0);
        refit_residual = refit_residual.max((vg.value(z) - quad).norm() / scale);
    }
    if refit_residual > REFIT_TOL {
        return Err(HbError::RefitResidual { residual: refit_residual });
    }
    let io = inner_outer(vg.num())?;
    let outer = UnitCircleFunction::rational(io.outer.clone(), vg.den().clone())?;
    let sig_f = sigma_upper(&outer)?;
    let sig_phi = sigma_upper(&phi)?;
    let base = TheoremCCertificate {
        vg_numerator: vg.num().coeffs().to_vec(),
        interior_zeros: io.theta.blaschke_zeros().to_vec(),
        outer_numerator: io.outer.coeffs().to_vec(),
        sigma_upper_outer: sig_f.clone(),
        sigma_upper_phi: sig_phi.clone(),
        refit_residual,
        outer_norm_sq: f64::NAN,
        norm_drift: f64::NAN,
    };
    if let Some(p) = sig_f.iter().find(|p| sig_phi.iter().any(|q| (p.zeta - q.zeta).norm() <= SEPARATION_TOL)) {
        return Ok(TheoremCOutcome {
            outer,
            certificate: Err(fail(RULE, format!("sigma bounds of F and phi share the point at angle {}", p.theta))),
        });
    }
    // F in H(b): the norms of successive Taylor truncations must settle.
    let n = crate::hb::truncation_degree(&outer)?;
    let e1 = space.element(&CPoly::new(outer.taylor(n)?));
    let e2 = space.element(&CPoly::new(outer.taylor(2 * n)?));
    let norm_drift = (e2.norm_sq() - e1.norm_sq()).abs() / e2.norm_sq().max(1e-300);
    if !(norm_drift < 1e-8) || !e2.norm_sq().is_finite() {
        return Ok(TheoremCOutcome {
            outer,
            certificate: Err(fail(RULE, format!("truncated norms of F do not settle: drift {norm_drift:e}"))),
        });
    }
    let cert = TheoremCCertificate { outer_norm_sq: e2.norm_sq(), norm_drift, ..base };
    Ok(TheoremCOutcome { outer, certificate: Ok(cert) })
}
