//! Bounds on the non-exposure set `sigma(phi)`, finite sections of the
//! Toeplitz operator with symbol `conj(phi)/phi`, and pseudocontinuation of
//! `J_phi` elements.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::boundary::{angle_of, roots, UnitCircleFunction};
use crate::clark::{self, alpha_grid, clark_family};
use crate::error::{HbError, Result};
use crate::hb::HbSpace;
use crate::par::{self, Exec};
use crate::scalar::C64;

pub use crate::clark::phi_alpha;

/// Singular values below this count toward the near-kernel.
pub const KERNEL_THRESHOLD: f64 = 1e-6;
/// Tolerance for the two-sided `J_phi` membership test.
pub const MEMBERSHIP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaPoint {
    pub zeta: C64,
    pub theta: f64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaBounds {
    /// Points certified to lie in `sigma(phi)`.
    pub lower: Vec<SigmaPoint>,
    /// Finite set certified to contain `sigma(phi)`.
    pub upper: Vec<SigmaPoint>,
    /// The `alpha` whose `phi_alpha` the bounds refer to.
    pub reference_alpha: C64,
    /// Whether `mu_1` itself is absolutely continuous.
    pub mu1_absolutely_continuous: bool,
}

impl SigmaBounds {
    pub fn lower_within_upper(&self, tol: f64) -> bool {
        self.lower.iter().all(|l| self.upper.iter().any(|u| (u.zeta - l.zeta).norm() <= tol))
    }
}

fn interior_root(p: &crate::poly::CPoly) -> Result<Option<C64>> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(None);
    }
    Ok(roots::roots(p, 1e-7)?.into_iter().map(|r| r.value).find(|v| v.norm() < 1.0 - 1e-10))
}

/// Unimodular zeros of the numerator of an outer rational `phi`.
pub fn sigma_upper(phi: &UnitCircleFunction) -> Result<Vec<SigmaPoint>> {
    if phi.num().is_zero() {
        return Err(HbError::ZeroPolynomial);
    }
    if let Some(r) = interior_root(phi.num())? {
        return Err(HbError::NotOuter { re: r.re, im: r.im });
    }
    Ok(phi
        .circle_zeros(1e-6)?
        .into_iter()
        .map(|r| {
            let z = r.value / r.value.norm();
            SigmaPoint { zeta: z, theta: angle_of(z), note: format!("circle zero of phi, multiplicity {}", r.multiplicity) }
        })
        .collect())
}

/// Union of Clark atom locations over the `alpha` sweep.
pub fn sigma_lower(space: &HbSpace) -> Result<Vec<SigmaPoint>> {
    let alphas = alpha_grid(space, 64)?;
    let mut out: Vec<SigmaPoint> = Vec::new();
    for mu in clark_family(space, &alphas)? {
        for a in &mu.atoms {
            if out.iter().all(|p| (p.zeta - a.zeta).norm() > 1e-8) {
                out.push(SigmaPoint {
                    zeta: a.zeta,
                    theta: a.theta,
                    note: format!("atom of mu_alpha, alpha angle {:.12}, mass {:.6e}", angle_of(mu.alpha), a.mass),
                });
            }
        }
    }
    out.sort_by(|x, y| x.theta.partial_cmp(&y.theta).unwrap());
    Ok(out)
}

/// Lower and upper bounds for `sigma(phi_alpha0)`, where `alpha0 = 1` when
/// `mu_1` has no atoms and otherwise the first sweep point without atoms
/// (equivalently, the bounds for the normalized symbol `conj(alpha0) b`).
pub fn sigma_bounds(space: &HbSpace) -> Result<SigmaBounds> {
    let one = C64::new(1.0, 0.0);
    let mu1 = clark::clark_measure(space, one)?;
    let reference_alpha = if mu1.is_absolutely_continuous() {
        one
    } else {
        let grid = alpha_grid(space, 64)?;
        let fam = clark_family(space, &grid)?;
        fam.into_iter().find(|m| m.is_absolutely_continuous()).map(|m| m.alpha).ok_or_else(|| HbError::Normalization {
            reason: "no atom-free alpha on the sweep".into(),
        })?
    };
    let phi = phi_alpha(space, reference_alpha)?;
    Ok(SigmaBounds {
        lower: sigma_lower(space)?,
        upper: sigma_upper(&phi)?,
        reference_alpha,
        mu1_absolutely_continuous: mu1.is_absolutely_continuous(),
    })
}

/// Bounds for the space built from a polynomial `phi`; a constant `phi`
/// has empty bounds.
pub fn sigma_bounds_from_phi(phi: &UnitCircleFunction, cfg: crate::config::Config) -> Result<SigmaBounds> {
    if phi.is_constant() {
        return Ok(SigmaBounds {
            lower: Vec::new(),
            upper: Vec::new(),
            reference_alpha: C64::new(1.0, 0.0),
            mu1_absolutely_continuous: true,
        });
    }
    sigma_bounds(&HbSpace::from_phi(phi, cfg)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct ToeplitzSectionReport {
    pub n: usize,
    /// Ascending.
    pub singular_values: Vec<f64>,
    pub near_kernel: usize,
    pub threshold: f64,
}

impl ToeplitzSectionReport {
    pub fn sigma_min(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelTrend {
    pub sections: Vec<ToeplitzSectionReport>,
    /// Near-kernel count, when it agrees across all sizes.
    pub estimated_dim: Option<usize>,
    pub sigma_min: Vec<f64>,
}

/// Fourier coefficients `u_k`, `|k| < n`, of `conj(phi)/phi`.
fn symbol_coeffs(phi: &UnitCircleFunction, n: usize) -> Vec<C64> {
    let m = (8 * n).max(1024).next_power_of_two();
    // Half-shifted nodes avoid circle zeros sitting on roots of unity.
    let mut buf: Vec<C64> = (0..m)
        .map(|j| {
            let z = C64::from_polar(1.0, PI * (2 * j + 1) as f64 / m as f64);
            let v = phi.value(z);
            v.conj() / v
        })
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    (-(n as i64 - 1)..n as i64)
        .map(|k| {
            let idx = k.rem_euclid(m as i64) as usize;
            buf[idx] * C64::from_polar(1.0, -PI * k as f64 / m as f64) / m as f64
        })
        .collect()
}

/// `n x n` section of `T_{conj(phi)/phi}` and its singular values.
pub fn toeplitz_kernel_sections(phi: &UnitCircleFunction, n: usize) -> Result<ToeplitzSectionReport> {
    if n == 0 || !n.is_power_of_two() || n > 4096 {
        return Err(HbError::InvalidConfig { reason: format!("section size {n} must be a power of two <= 4096") });
    }
    if let Some(r) = interior_root(phi.num())? {
        return Err(HbError::NotOuter { re: r.re, im: r.im });
    }
    let u = symbol_coeffs(phi, n);
    let off = n as i64 - 1;
    let t = DMatrix::<C64>::from_fn(n, n, |m, k| u[(m as i64 - k as i64 + off) as usize]);
    let mut sv: Vec<f64> = t.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let near_kernel = sv.iter().filter(|s| **s < KERNEL_THRESHOLD).count();
    Ok(ToeplitzSectionReport { n, singular_values: sv, near_kernel, threshold: KERNEL_THRESHOLD })
}

/// Sections of size `n, 2n, 4n`, computed concurrently.
pub fn toeplitz_trend(phi: &UnitCircleFunction, n: usize, exec: Exec) -> Result<KernelTrend> {
    let sizes = [n, 2 * n, 4 * n];
    let sections: Vec<ToeplitzSectionReport> =
        par::map_slice(exec, &sizes, |&m| toeplitz_kernel_sections(phi, m)).into_iter().collect::<Result<_>>()?;
    let first = sections[0].near_kernel;
    let estimated_dim = sections.iter().all(|s| s.near_kernel == first).then_some(first);
    let sigma_min = sections.iter().map(ToeplitzSectionReport::sigma_min).collect();
    Ok(KernelTrend { sections, estimated_dim, sigma_min })
}

/// Boundary data of a candidate `J_phi` element on the half-shifted grid
/// `exp(i pi (2j+1)/n)`.
#[derive(Debug, Clone)]
pub struct JPhiWitness {
    nodes: Vec<C64>,
    phi_h: Vec<C64>,
    conj_phi_h: Vec<C64>,
    pub residual: f64,
}

fn shifted_nodes(n: usize) -> Vec<C64> {
    (0..n).map(|j| C64::from_polar(1.0, PI * (2 * j + 1) as f64 / n as f64)).collect()
}

/// `(negative-frequency energy, nonnegative-frequency energy, total)`.
fn frequency_split(samples: &[C64]) -> (f64, f64, f64) {
    let n = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let (mut neg, mut pos) = (0.0, 0.0);
    for (k, v) in buf.iter().enumerate() {
        let e = (v / n as f64).norm_sqr();
        if k < n / 2 {
            pos += e;
        } else {
            neg += e;
        }
    }
    (neg, pos, neg + pos)
}

impl JPhiWitness {
    /// Samples `h` and checks `phi h` analytic and `conj(phi) h` anti-analytic
    /// with zero mean.
    pub fn new<H: Fn(C64) -> C64>(phi: &UnitCircleFunction, h: H, n: usize) -> Result<Self> {
        if n < 256 || !n.is_power_of_two() {
            return Err(HbError::InvalidConfig { reason: format!("sample count {n} must be a power of two >= 256") });
        }
        let nodes = shifted_nodes(n);
        let mut phi_h = Vec::with_capacity(n);
        let mut conj_phi_h = Vec::with_capacity(n);
        for &z in &nodes {
            let p = phi.value(z);
            let hv = h(z);
            phi_h.push(p * hv);
            conj_phi_h.push(p.conj() * hv);
        }
        let (neg, _, tot1) = frequency_split(&phi_h);
        let (_, pos, tot2) = frequency_split(&conj_phi_h);
        let scale = tot1.max(tot2).max(1e-300);
        let residual = ((neg + pos) / scale).sqrt();
        if residual > MEMBERSHIP_TOL {
            return Err(HbError::NotInJPhi { residual });
        }
        Ok(JPhiWitness { nodes, phi_h, conj_phi_h, residual })
    }

    fn poisson(&self, vals: &[C64], w: C64) -> C64 {
        let n = self.nodes.len() as f64;
        let s = 1.0 - w.norm_sqr();
        self.nodes.iter().zip(vals).map(|(z, v)| v * (s / (z - w).norm_sqr())).sum::<C64>() / n
    }

    /// Value of the pseudocontinuation at `z` off the circle.
    pub fn eval(&self, phi: &UnitCircleFunction, z: C64) -> Result<C64> {
        let m = z.norm();
        if (m - 1.0).abs() < 1e-12 {
            return Err(HbError::OnCircle);
        }
        if m < 1.0 {
            let p = phi.value(z);
            if p.norm() == 0.0 {
                return Err(HbError::PoleAt { re: z.re, im: z.im });
            }
            Ok(self.poisson(&self.phi_h, z) / p)
        } else {
            let w = C64::new(1.0, 0.0) / z.conj();
            let p = phi.value(w).conj();
            if p.norm() == 0.0 {
                return Err(HbError::PoleAt { re: z.re, im: z.im });
            }
            Ok(self.poisson(&self.conj_phi_h, w) / p)
        }
    }
}

/// One-shot evaluation: membership check then the interior or exterior
/// Poisson formula.
pub fn pseudocontinuation_eval<H: Fn(C64) -> C64>(phi: &UnitCircleFunction, h: H, n: usize, z: C64) -> Result<C64> {
    JPhiWitness::new(phi, h, n)?.eval(phi, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::literal::parse_function;
    use crate::config::Config;
    use crate::poly::CPoly;
    use rand::{Rng, SeedableRng};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn phi_lin() -> UnitCircleFunction {
        UnitCircleFunction::polynomial(CPoly::from_real(&[1.0, -1.0]).scale(&c(0.5f64.sqrt()))).unwrap()
    }

    #[test]
    fn upper_examples() {
        let p = parse_function("1/(2+z)").unwrap();
        assert!(sigma_upper(&p).unwrap().is_empty());
        let u = sigma_upper(&phi_lin()).unwrap();
        assert_eq!(u.len(), 1);
        assert!((u[0].zeta - c(1.0)).norm() < 1e-12);
        let u = sigma_upper(&parse_function("(1-z)(1+z)/2").unwrap()).unwrap();
        assert_eq!(u.len(), 2);
        assert!(matches!(sigma_upper(&parse_function("z-0.5").unwrap()), Err(HbError::NotOuter { .. })));
    }

    #[test]
    fn lower_examples() {
        let cfg = Config::default();
        let b = sigma_bounds_from_phi(&phi_lin(), cfg).unwrap();
        assert_eq!(b.lower.len(), 1);
        assert!((b.lower[0].zeta - c(1.0)).norm() < 1e-8);
        assert!(b.mu1_absolutely_continuous);
        assert!(b.lower_within_upper(1e-8));
        let s = HbSpace::new(parse_function("z/2").unwrap(), cfg).unwrap();
        assert!(sigma_lower(&s).unwrap().is_empty());
        let one = sigma_bounds_from_phi(&parse_function("1").unwrap(), cfg).unwrap();
        assert!(one.lower.is_empty() && one.upper.is_empty());
    }

    #[test]
    fn bounds_nested_on_unnormalized_spaces() {
        for b in ["(1+z)/2", "z(1+z)/2", "(3z+z^2)/4", "z/(2+z)", "z/2"] {
            let s = HbSpace::new(parse_function(b).unwrap(), Config::default()).unwrap();
            let bounds = sigma_bounds(&s).unwrap();
            assert!(bounds.lower_within_upper(1e-8), "{b}");
        }
    }

    #[test]
    fn sections() {
        for n in [64, 128] {
            let r = toeplitz_kernel_sections(&phi_lin(), n).unwrap();
            assert_eq!(r.near_kernel, 1);
        }
        let p = parse_function("1/(2+z)").unwrap();
        let t = toeplitz_trend(&p, 32, Exec::Parallel).unwrap();
        assert_eq!(t.estimated_dim, Some(0));
        for s in &t.sigma_min {
            assert!(*s > 0.2);
        }
        let one = toeplitz_kernel_sections(&parse_function("1").unwrap(), 16).unwrap();
        assert!(one.singular_values.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert!(toeplitz_kernel_sections(&parse_function("z-0.5").unwrap(), 16).is_err());
        assert!(toeplitz_kernel_sections(&phi_lin(), 48).is_err());
    }

    #[test]
    fn pseudocontinuation_examples() {
        let phi = phi_lin();
        let h = |z: C64| C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - z);
        let w = JPhiWitness::new(&phi, h, 4096).unwrap();
        assert!((w.eval(&phi, c(-0.9)).unwrap() - c(1.0 / 1.9)).norm() < 1e-10);
        let ext = c(-1.0 / 0.9);
        assert!((w.eval(&phi, ext).unwrap() - h(ext)).norm() < 1e-10);
        assert_eq!(w.eval(&phi, c(-1.0)).unwrap_err(), HbError::OnCircle);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..40 {
            let t = rng.random_range(0.3..6.0);
            let r: f64 = if rng.random_bool(0.5) { rng.random_range(0.1..0.9) } else { rng.random_range(1.1..3.0) };
            let z = C64::from_polar(r, t);
            assert!((w.eval(&phi, z).unwrap() - h(z)).norm() < 1e-6);
        }
        let bad = pseudocontinuation_eval(&parse_function("1/(2+z)").unwrap(), |_| c(1.0), 1024, c(0.5));
        assert!(matches!(bad, Err(HbError::NotInJPhi { .. })));
    }

    #[test]
    fn inside_outside_agree_near_circle() {
        let phi = phi_lin();
        let h = |z: C64| C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - z);
        let w = JPhiWitness::new(&phi, h, 1 << 16).unwrap();
        let r = 1.0 - (2f64).powi(-10);
        let zeta = C64::from_polar(1.0, 2.0);
        let inner = w.eval(&phi, zeta * r).unwrap();
        let outer = w.eval(&phi, zeta / r).unwrap();
        assert!((inner - outer).norm() < 1e-3);
    }
}
