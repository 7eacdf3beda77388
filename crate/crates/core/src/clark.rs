//! Aleksandrov-Clark measures of `b`, the normalized Cauchy transform and
//! radial boundary limits.
//!
//! For `b = p/q` and unimodular `alpha` the Herglotz function of `mu_alpha`
//! is `H = (q + conj(alpha) p)/(q - conj(alpha) p)`. Atoms sit at the circle
//! roots of `q - conj(alpha) p`; the absolutely continuous part has density
//! `|phi_alpha|^2` with `phi_alpha = a / (1 - conj(alpha) b)`.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::boundary::{angle_of, cauchy, node, roots, Atom, Measure, UnitCircleFunction};
use crate::config::GridConfig;
use crate::error::{HbError, Result};
use crate::hb::{HbElement, HbSpace};
use crate::par;
use crate::poly::CPoly;
use crate::scalar::C64;

const ATOM_TOL: f64 = 1e-8;
const MAX_AC_GRID: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClarkAtom {
    pub zeta: C64,
    pub theta: f64,
    pub mass: f64,
    /// Extrapolation error estimate for the mass.
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct ClarkMeasure {
    pub alpha: C64,
    /// `phi_alpha` after cancelling common circle roots.
    pub phi: UnitCircleFunction,
    pub atoms: Vec<ClarkAtom>,
    /// `H(0)`, whose real part is the total mass.
    pub herglotz_at_zero: C64,
    pub ac_mass: f64,
    /// Grid size at which the absolutely continuous mass settled.
    pub ac_grid: usize,
}

impl ClarkMeasure {
    pub fn total_mass(&self) -> f64 {
        self.herglotz_at_zero.re
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Mass bookkeeping defect `|atoms + ac - Re H(0)|`, relative.
    pub fn mass_defect(&self) -> f64 {
        let t = self.total_mass();
        (self.atom_mass() + self.ac_mass - t).abs() / t.abs().max(1e-300)
    }

    pub fn measure(&self) -> Measure {
        Measure::with_density(
            self.phi.clone(),
            self.atoms.iter().map(|a| Atom { zeta: a.zeta, mass: a.mass }).collect(),
        )
    }

    pub fn is_absolutely_continuous(&self) -> bool {
        self.atoms.is_empty()
    }
}

fn check_alpha(alpha: C64) -> Result<()> {
    if (alpha.norm() - 1.0).abs() > 1e-12 {
        return Err(HbError::NotUnimodular { modulus: alpha.norm() });
    }
    Ok(())
}

/// Limit of `g(1 - h)` as `h = 2^-k -> 0`, by two rounds of Richardson
/// elimination over `k = k0..=k1`. Returns `(limit, error estimate)`.
pub fn radial_limit<G: Fn(f64) -> f64>(grid: &GridConfig, g: G) -> (f64, f64) {
    let vals: Vec<f64> = grid.radii().into_iter().map(g).collect();
    let r1: Vec<f64> = vals.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let r2: Vec<f64> = r1.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    match r2.len() {
        0 => (*r1.last().unwrap_or(&vals[vals.len() - 1]), f64::NAN),
        1 => (r2[0], (r2[0] - r1[r1.len() - 1]).abs()),
        n => (r2[n - 1], (r2[n - 1] - r2[n - 2]).abs()),
    }
}

/// Complex version of [`radial_limit`].
pub fn radial_limit_c<G: Fn(f64) -> C64>(grid: &GridConfig, g: G) -> (C64, f64) {
    let vals: Vec<C64> = grid.radii().into_iter().map(g).collect();
    let (re, e1) = radial_limit_from(&vals.iter().map(|v| v.re).collect::<Vec<_>>());
    let (im, e2) = radial_limit_from(&vals.iter().map(|v| v.im).collect::<Vec<_>>());
    (C64::new(re, im), e1.hypot(e2))
}

fn radial_limit_from(vals: &[f64]) -> (f64, f64) {
    let r1: Vec<f64> = vals.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let r2: Vec<f64> = r1.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    let n = r2.len();
    (r2[n - 1], (r2[n - 1] - r2[n - 2]).abs())
}

/// `q - conj(alpha) p`, the denominator of `H` and of `phi_alpha`.
fn shifted_den(space: &HbSpace, alpha: C64) -> CPoly {
    space.q() - &space.p().scale(&alpha.conj())
}

/// Herglotz function `(1 + conj(alpha) b)/(1 - conj(alpha) b)` at `z`.
pub fn herglotz_value(space: &HbSpace, alpha: C64, z: C64) -> C64 {
    let bz = space.b().value(z) * alpha.conj();
    (C64::new(1.0, 0.0) + bz) / (C64::new(1.0, 0.0) - bz)
}

/// `phi_alpha = a/(1 - conj(alpha) b)` with common circle roots cancelled.
pub fn phi_alpha(space: &HbSpace, alpha: C64) -> Result<UnitCircleFunction> {
    check_alpha(alpha)?;
    UnitCircleFunction::rational_singular(space.a_num().clone(), shifted_den(space, alpha))
}

pub fn clark_measure(space: &HbSpace, alpha: C64) -> Result<ClarkMeasure> {
    let atoms = clark_atoms(space, alpha)?;
    let cfg = space.config();
    let phi = phi_alpha(space, alpha)?;
    let (ac_mass, ac_grid) = ac_mass(&phi, cfg.grid.n, cfg.exec);
    Ok(ClarkMeasure { alpha, phi, atoms, herglotz_at_zero: herglotz_value(space, alpha, C64::new(0.0, 0.0)), ac_mass, ac_grid })
}

/// Atoms of `mu_alpha` only, sorted by angle; skips the absolutely
/// continuous quadrature.
pub fn clark_atoms(space: &HbSpace, alpha: C64) -> Result<Vec<ClarkAtom>> {
    check_alpha(alpha)?;
    let cfg = space.config();
    let den = shifted_den(space, alpha);
    let mut atoms = Vec::new();
    if den.degree().unwrap_or(0) > 0 {
        for r in roots::roots(&den, cfg.root_cluster_tol)? {
            if (r.value.norm() - 1.0).abs() > 1e-6 {
                continue;
            }
            let zeta = r.value / r.value.norm();
            if (space.b().value(zeta) - alpha).norm() >= ATOM_TOL {
                continue;
            }
            let (mass, error) = radial_limit(&cfg.grid, |rad| {
                (1.0 - rad) / (1.0 + rad) * herglotz_value(space, alpha, zeta * rad).re
            });
            atoms.push(ClarkAtom { zeta, theta: angle_of(zeta), mass, error });
        }
    }
    atoms.sort_by(|x, y| x.theta.partial_cmp(&y.theta).unwrap());
    Ok(atoms)
}

/// `int |phi|^2 dm`, doubling the grid until two levels agree to 1e-10.
fn ac_mass(phi: &UnitCircleFunction, n0: usize, exec: par::Exec) -> (f64, usize) {
    let m = Measure::with_density(phi.clone(), Vec::new());
    let mut n = n0;
    let mut prev = m.ac_mass(n, exec);
    while n < MAX_AC_GRID {
        n *= 2;
        let cur = m.ac_mass(n, exec);
        if (cur - prev).abs() <= 1e-10 * cur.abs().max(1.0) {
            return (cur, n);
        }
        prev = cur;
    }
    (prev, n)
}

/// `count` equispaced unimodular points plus `b(zeta)` at each circle root
/// of `a`, where `|b| = 1`.
pub fn alpha_grid(space: &HbSpace, count: usize) -> Result<Vec<C64>> {
    let mut out: Vec<C64> = (0..count).map(|k| node(count, k)).collect();
    for r in space.a().circle_zeros(1e-6)? {
        let zeta = r.value / r.value.norm();
        let bz = space.b().value(zeta);
        let al = bz / bz.norm();
        if out.iter().all(|x| (x - al).norm() > 1e-12) {
            out.push(al);
        }
    }
    Ok(out)
}

/// Clark measures for several `alpha`, in input order.
pub fn clark_family(space: &HbSpace, alphas: &[C64]) -> Result<Vec<ClarkMeasure>> {
    par::map_slice(space.config().exec, alphas, |&al| clark_measure(space, al)).into_iter().collect()
}

/// Taylor coefficients `H_0..H_{n-1}` of the Herglotz function.
fn herglotz_taylor(space: &HbSpace, alpha: C64, n: usize) -> CPoly {
    let num = space.q() + &space.p().scale(&alpha.conj());
    CPoly::series_div(&num, &shifted_den(space, alpha), n)
}

/// `V_alpha h = (1 - conj(alpha) b) C_mu h` in closed form for polynomial
/// `h`; the result is `N / q` with the denominator of `b`.
///
/// `C_mu z^k = S_k + z^k (H + conj(H_0))/2` with
/// `S_k = sum_{n<k} conj(H_{k-n})/2 z^n`.
pub fn normalized_cauchy_poly(space: &HbSpace, alpha: C64, h: &CPoly) -> Result<UnitCircleFunction> {
    check_alpha(alpha)?;
    let q = space.q();
    let d = shifted_den(space, alpha);
    let s = q + &space.p().scale(&alpha.conj());
    let ht = herglotz_taylor(space, alpha, h.len() + 1);
    let h0c = ht.coeff(0).conj();
    // base = ((q + conj(alpha) p) + conj(H_0) (q - conj(alpha) p)) / 2
    let base = (&s + &d.scale(&h0c)).scale(&C64::new(0.5, 0.0));
    let mut num = CPoly::zero();
    for (k, hk) in h.coeffs().iter().enumerate() {
        if *hk == C64::new(0.0, 0.0) {
            continue;
        }
        let sk = CPoly::new((0..k).map(|n| ht.coeff(k - n).conj() * 0.5).collect());
        let term = &(&d * &sk) + &base.shift(k);
        num = &num + &term.scale(hk);
    }
    UnitCircleFunction::rational(num, q.clone())
}

/// `V_alpha h` as an element of `H(b)`.
pub fn v_element(space: &HbSpace, alpha: C64, h: &CPoly) -> Result<HbElement> {
    space.element_from_function(&normalized_cauchy_poly(space, alpha, h)?)
}

/// `V_alpha h (z)` by quadrature against `mu_alpha`, for any boundary function `h`.
pub fn normalized_cauchy<H>(space: &HbSpace, mu: &ClarkMeasure, h: H, z: C64) -> Result<C64>
where
    H: Fn(C64) -> C64 + Sync + Send,
{
    let c = cauchy(&mu.measure(), h, z, &space.config().grid, space.config().exec)?;
    Ok((C64::new(1.0, 0.0) - mu.alpha.conj() * space.b().value(z)) * c)
}

/// Gram matrix of `{1, z, ..., z^{n-1}}` in `L^2(mu)` by quadrature with atoms.
pub fn l2_gram(space: &HbSpace, mu: &ClarkMeasure, n: usize) -> Vec<Vec<C64>> {
    let m = mu.measure();
    let grid = mu.ac_grid.max(space.config().grid.n);
    // Moments mu^(j) = int conj(zeta)^j dmu for |j| < n.
    let moments: Vec<C64> = (0..n).map(|j| m.integrate(|z| z.conj().powu(j as u32), grid, space.config().exec)).collect();
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    // <z^j, z^k> = int zeta^{j-k} dmu = mu^(k-j)
                    if k >= j {
                        moments[k - j]
                    } else {
                        moments[j - k].conj()
                    }
                })
                .collect()
        })
        .collect()
}

/// Gram matrix of `{V 1, V z, ..., V z^{n-1}}` in `H(b)`.
pub fn hb_gram_of_v(space: &HbSpace, alpha: C64, n: usize) -> Result<Vec<Vec<C64>>> {
    let es = (0..n).map(|k| v_element(space, alpha, &CPoly::monomial(k))).collect::<Result<Vec<_>>>()?;
    space.gram(&es)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoltoratskiLimit {
    pub value: C64,
    pub error: f64,
}

/// Radial limit of `V_alpha h` at an atom of `mu_alpha`.
pub fn poltoratski_limit(space: &HbSpace, alpha: C64, h: &CPoly, zeta: C64) -> Result<PoltoratskiLimit> {
    let mu = clark_measure(space, alpha)?;
    if !mu.atoms.iter().any(|a| (a.zeta - zeta).norm() < 1e-6) {
        return Err(HbError::NotAnAtom { angle: angle_of(zeta) });
    }
    let v = normalized_cauchy_poly(space, alpha, h)?;
    let (value, error) = radial_limit_c(&space.config().grid, |r| v.value(zeta * r));
    Ok(PoltoratskiLimit { value, error })
}

/// Density samples `|phi_alpha|^2` at `n` equispaced angles.
pub fn density_samples(mu: &ClarkMeasure, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            (t, mu.phi.value(C64::from_polar(1.0, t)).norm_sqr())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::literal::parse_function;
    use crate::config::Config;
    use rand::{Rng, SeedableRng};

    fn space(s: &str) -> HbSpace {
        HbSpace::new(parse_function(s).unwrap(), Config::default()).unwrap()
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn clark_examples() {
        let mu = clark_measure(&space("z(1+z)/2"), c(1.0)).unwrap();
        assert_eq!(mu.atoms.len(), 1);
        assert!((mu.atoms[0].zeta - c(1.0)).norm() < 1e-12);
        assert!((mu.atoms[0].mass - 2.0 / 3.0).abs() < 1e-6);
        assert!((mu.ac_mass - 1.0 / 3.0).abs() < 1e-8);
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        assert!(mu.phi.num().degree() == Some(0) && mu.phi.den().degree() == Some(1));

        let mu = clark_measure(&space("(1+z)/2"), c(1.0)).unwrap();
        assert_eq!(mu.atoms.len(), 1);
        assert!((mu.atoms[0].mass - 2.0).abs() < 1e-6);
        assert!((mu.ac_mass - 1.0).abs() < 1e-10);
        assert!((mu.total_mass() - 3.0).abs() < 1e-12);

        let mu = clark_measure(&space("z/2"), c(1.0)).unwrap();
        assert!(mu.atoms.is_empty());
        assert!((mu.ac_mass - 1.0).abs() < 1e-8);
        assert!(clark_measure(&space("z/2"), c(0.5)).is_err());
    }

    #[test]
    fn mass_conservation_random_alpha() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for b in ["(1+z)/2", "z(1+z)/2", "z/2", "(3z+z^2)/4", "z/(2+z)"] {
            let s = space(b);
            let mut alphas: Vec<C64> = (0..16).map(|_| C64::from_polar(1.0, rng.random_range(0.0..TAU))).collect();
            alphas.extend(alpha_grid(&s, 4).unwrap());
            for mu in clark_family(&s, &alphas).unwrap() {
                assert!(mu.mass_defect() < 1e-6, "{b} alpha={}: {}", mu.alpha, mu.mass_defect());
                for a in &mu.atoms {
                    assert!(a.mass > 0.0);
                    assert!((s.b().value(a.zeta) - mu.alpha).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn no_atoms_for_small_b() {
        let s = space("z/2");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..32 {
            let al = C64::from_polar(1.0, rng.random_range(0.0..TAU));
            assert!(clark_measure(&s, al).unwrap().atoms.is_empty());
        }
    }

    #[test]
    fn phi_alpha_examples() {
        let p = phi_alpha(&space("z(1+z)/2"), c(1.0)).unwrap();
        assert!((p.value(c(0.3)) - c(1.0 / 2.3)).norm() < 1e-12);
        let p = phi_alpha(&space("z/2"), c(1.0)).unwrap();
        assert!((p.value(c(0.4)) - c(3f64.sqrt() / 2.0 / 0.8)).norm() < 1e-12);
        let p = phi_alpha(&space("(1+z)/2"), c(1.0)).unwrap();
        assert!(p.is_polynomial() && (p.value(c(0.7)) - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn v_of_one_is_one() {
        // Holds when b(0) = 0; otherwise V 1 = ((1 + conj(alpha) b) + conj(H(0)) (1 - conj(alpha) b)) / 2.
        for b in ["z(1+z)/2", "z/2", "z/(2+z)"] {
            let s = space(b);
            let v = normalized_cauchy_poly(&s, C64::from_polar(1.0, 0.7), &CPoly::one()).unwrap();
            for z in [c(0.0), C64::new(0.3, 0.5), c(-0.9)] {
                assert!((v.value(z) - c(1.0)).norm() < 1e-12, "{b}");
            }
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for b in ["z/2", "z(1+z)/2", "(1+z)/2"] {
            let s = space(b);
            let mu = clark_measure(&s, c(1.0)).unwrap();
            let h = CPoly::from_real(&[0.3, -1.0, 0.5]);
            let v = normalized_cauchy_poly(&s, c(1.0), &h).unwrap();
            for z in [c(0.2), C64::new(-0.4, 0.5)] {
                let q = normalized_cauchy(&s, &mu, |w| h.eval(&w), z).unwrap();
                assert!((q - v.value(z)).norm() < 1e-6, "{b}: {q} vs {}", v.value(z));
            }
        }
    }

    #[test]
    fn kernel_identity() {
        let s = space("z/2");
        let mu = clark_measure(&s, c(1.0)).unwrap();
        let lam = c(0.4);
        let k = s.kernel(lam).unwrap();
        let factor = C64::new(1.0, 0.0) - s.b().value(lam).conj();
        for j in 0..16 {
            let z = node(16, j) * 0.9;
            let v = normalized_cauchy(&s, &mu, |w| C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - lam.conj() * w), z).unwrap();
            assert!((factor * v - k.value(z)).norm() < 1e-7);
        }
    }

    #[test]
    fn unitarity_small() {
        for b in ["z/2", "z(1+z)/2", "(1+z)/2", "z/(2+z)"] {
            let s = space(b);
            let mu = clark_measure(&s, c(1.0)).unwrap();
            let g1 = hb_gram_of_v(&s, c(1.0), 4).unwrap();
            let g2 = l2_gram(&s, &mu, 4);
            for j in 0..4 {
                for k in 0..4 {
                    assert!((g1[j][k] - g2[j][k]).norm() < 1e-6, "{b} ({j},{k}): {} vs {}", g1[j][k], g2[j][k]);
                }
            }
        }
    }

    #[test]
    fn poltoratski_examples() {
        let s = space("z(1+z)/2");
        let one = poltoratski_limit(&s, c(1.0), &CPoly::one(), c(1.0)).unwrap();
        assert!((one.value - c(1.0)).norm() < 1e-9);
        let zz = poltoratski_limit(&s, c(1.0), &CPoly::monomial(1), c(1.0)).unwrap();
        assert!((zz.value - c(1.0)).norm() < 1e-3);
        let s2 = space("(1+z)/2");
        let z2 = poltoratski_limit(&s2, c(1.0), &CPoly::monomial(2), c(1.0)).unwrap();
        assert!((z2.value - c(1.0)).norm() < 1e-3);
        assert!(matches!(poltoratski_limit(&s2, c(1.0), &CPoly::one(), c(-1.0)), Err(HbError::NotAnAtom { .. })));
    }

    #[test]
    fn richardson_exact_on_quadratics() {
        let g = GridConfig::default();
        let (v, e) = radial_limit(&g, |r| 2.0 + 3.0 * (1.0 - r) - 5.0 * (1.0 - r).powi(2));
        assert!((v - 2.0).abs() < 1e-12 && e < 1e-12);
    }
}
