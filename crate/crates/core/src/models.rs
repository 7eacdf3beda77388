//! Closed-form model spaces used as independent oracles: Dirichlet-type
//! spaces `D(mu)` for finitely supported `mu`, the spaces with
//! `b = (1 + theta)/2` for finite Blaschke `theta`, and the cyclicity of `b`
//! and of reproducing kernels.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::boundary::{angle_of, roots, UnitCircleFunction};
use crate::clark::{radial_limit, ClarkAtom};
use crate::config::Config;
use crate::cyclicity::{classify_finite_defect, decay_table, estimate_from_decay, CyclicityReport, DecayThresholds, Evidence, Verdict};
use crate::error::{HbError, Result};
use crate::factor::is_outer;
use crate::hb::{truncation_degree, HbSpace};
use crate::par;
use crate::poly::{CPoly, QPoly};
use crate::scalar::{qc_approx, Scalar, C64, QC};

const ZERO_TOL: f64 = 1e-9;

/// Finitely supported positive measure on the circle.
#[derive(Debug, Clone, Serialize)]
pub struct DirichletSpec {
    atoms: Vec<(C64, f64)>,
}

impl DirichletSpec {
    /// Atoms `(zeta, weight)`; points are projected onto the circle after a
    /// `1e-9` sanity check.
    pub fn new(atoms: Vec<(C64, f64)>) -> Result<Self> {
        let mut out: Vec<(C64, f64)> = Vec::with_capacity(atoms.len());
        for (z, w) in atoms {
            if (z.norm() - 1.0).abs() > 1e-9 {
                return Err(HbError::NotUnimodular { modulus: z.norm() });
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(HbError::InvalidConfig { reason: format!("atom weight {w} must be positive") });
            }
            let z = z / z.norm();
            if out.iter().any(|(y, _)| (y - z).norm() < 1e-12) {
                return Err(HbError::InvalidConfig { reason: format!("repeated atom at angle {}", angle_of(z)) });
            }
            out.push((z, w));
        }
        Ok(DirichletSpec { atoms: out })
    }

    pub fn atoms(&self) -> &[(C64, f64)] {
        &self.atoms
    }

    /// Gaussian-rational copy, available when every atom has an exactly
    /// unimodular rational representative (e.g. `1`, `-1`, `i`, `3/5 + 4/5 i`).
    pub fn to_exact(&self) -> Option<Vec<(QC, BigRational)>> {
        self.atoms
            .iter()
            .map(|(z, w)| {
                let zq = qc_approx(*z, 1e-15, 1 << 20)?;
                if &zq.re * &zq.re + &zq.im * &zq.im != BigRational::one() {
                    return None;
                }
                Some((zq, qc_approx(C64::new(*w, 0.0), 1e-15, 1 << 20)?.re))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DirichletNorm {
    /// `D_mu(f)`.
    pub dirichlet: f64,
    /// `|f|_2^2`.
    pub l2: f64,
    /// `|f|^2 = D_mu(f) + |f|_2^2`.
    pub total: f64,
}

/// `D_mu(f) = sum_i w_i |(f - f(zeta_i))/(z - zeta_i)|_2^2`, plus `|f|_2^2`.
pub fn dirichlet_norm(spec: &DirichletSpec, f: &CPoly) -> DirichletNorm {
    let dirichlet = spec.atoms.iter().map(|(z, w)| w * f.deflate(z).0.norm_sq_f64()).sum::<f64>();
    let l2 = f.norm_sq_f64();
    DirichletNorm { dirichlet, l2, total: dirichlet + l2 }
}

/// Exact `(D_mu(f), |f|^2)`.
pub fn dirichlet_norm_exact(atoms: &[(QC, BigRational)], f: &QPoly) -> Result<(BigRational, BigRational)> {
    let mut d = BigRational::zero();
    for (z, w) in atoms {
        if &z.re * &z.re + &z.im * &z.im != BigRational::one() {
            return Err(HbError::NotUnimodular { modulus: z.to_c64().norm() });
        }
        d += w * f.deflate(z).0.norm_sq().re;
    }
    let l2 = f.norm_sq().re;
    let total = &d + &l2;
    Ok((d, total))
}

/// Cyclicity in `D(mu)`: outer and nonzero at every atom.
pub fn dirichlet_cyclic(spec: &DirichletSpec, f: &CPoly) -> Result<CyclicityReport> {
    let outer = is_outer(f)?;
    let values: Vec<serde_json::Value> =
        spec.atoms.iter().map(|(z, _)| json!({ "theta": angle_of(*z), "abs_f": f.eval(z).norm() })).collect();
    let vanishes = spec.atoms.iter().any(|(z, _)| f.eval(z).norm() <= ZERO_TOL);
    let verdict = if outer && !vanishes { Verdict::Cyclic } else { Verdict::NotCyclic };
    let n = dirichlet_norm(spec, f);
    Ok(CyclicityReport::single(Evidence {
        rule: "dirichlet_point_mass_classifier".into(),
        basis: "in D(mu) with finitely supported mu, f is cyclic iff it is outer and nonzero at every atom".into(),
        verdict,
        inputs: json!({ "f": f.coeffs(), "atoms": spec.atoms }),
        numbers: json!({ "outer": outer, "atom_values": values, "norm": "dirichlet", "norm_sq": n.total }),
    }))
}

/// Model space with `b = (1 + theta)/2`, `a = (1 - theta)/2`.
#[derive(Debug, Clone)]
pub struct ThetaModel {
    pub theta: UnitCircleFunction,
    pub b: UnitCircleFunction,
    pub a: UnitCircleFunction,
    /// Point masses of `sigma`, the measure with Herglotz transform
    /// `(1 + theta)/(1 - theta)`, located where `theta = 1`.
    pub atoms: Vec<ClarkAtom>,
    pub herglotz_at_zero: f64,
    /// `dim K_theta`, the degree of `theta`.
    pub model_dim: usize,
    /// `max | |theta| - 1 |` on the sampling grid.
    pub unimodularity_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaSummary {
    pub atoms: Vec<ClarkAtom>,
    pub mass_sum: f64,
    pub herglotz_at_zero: f64,
    pub model_dim: usize,
    pub unimodularity_error: f64,
}

impl ThetaModel {
    pub fn mass_sum(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn space(&self, cfg: Config) -> Result<HbSpace> {
        HbSpace::new(self.b.clone(), cfg)
    }

    pub fn summary(&self) -> ThetaSummary {
        ThetaSummary {
            atoms: self.atoms.clone(),
            mass_sum: self.mass_sum(),
            herglotz_at_zero: self.herglotz_at_zero,
            model_dim: self.model_dim,
            unimodularity_error: self.unimodularity_error,
        }
    }
}

pub fn theta_model(theta: &UnitCircleFunction, cfg: &Config) -> Result<ThetaModel> {
    if theta.is_constant() {
        return Err(HbError::Constant);
    }
    if theta.is_boundary_singular() {
        return Err(HbError::BoundaryPole);
    }
    let unimodularity_error =
        theta.samples(cfg.grid.n).iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max);
    if unimodularity_error > 1e-10 {
        return Err(HbError::NotUnimodular { modulus: 1.0 + unimodularity_error });
    }
    let (num, den) = (theta.num(), theta.den());
    let half = C64::new(0.5, 0.0);
    let b = UnitCircleFunction::rational((num + den).scale(&half), den.clone())?;
    let a = UnitCircleFunction::rational((den - num).scale(&half), den.clone())?;
    let h = |z: C64| {
        let t = theta.value(z);
        (C64::new(1.0, 0.0) + t) / (C64::new(1.0, 0.0) - t)
    };
    let diff = den - num;
    let mut atoms = Vec::new();
    for r in roots(&diff, cfg.root_cluster_tol)? {
        if (r.value.norm() - 1.0).abs() > 1e-6 {
            continue;
        }
        let zeta = r.value / r.value.norm();
        let (mass, error) = radial_limit(&cfg.grid, |rad| (1.0 - rad) / (1.0 + rad) * h(zeta * rad).re);
        atoms.push(ClarkAtom { zeta, theta: angle_of(zeta), mass, error });
    }
    atoms.sort_by(|x, y| x.theta.partial_cmp(&y.theta).unwrap());
    let model_dim = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
    Ok(ThetaModel { theta: theta.clone(), b, a, atoms, herglotz_at_zero: h(C64::new(0.0, 0.0)).re, model_dim, unimodularity_error })
}

/// Cyclicity in the `theta` model: outer and nonzero at every atom of `sigma`.
pub fn theta_cyclic(model: &ThetaModel, f: &CPoly) -> Result<CyclicityReport> {
    let outer = is_outer(f)?;
    let values: Vec<(f64, f64)> = model.atoms.iter().map(|a| (a.theta, f.eval(&a.zeta).norm())).collect();
    let vanishes = values.iter().any(|(_, v)| *v <= ZERO_TOL);
    let verdict = if outer && !vanishes { Verdict::Cyclic } else { Verdict::NotCyclic };
    Ok(CyclicityReport::single(Evidence {
        rule: "inner_model_classifier".into(),
        basis: "for b = (1 + theta)/2, f is cyclic iff it is outer and nonzero sigma-almost everywhere".into(),
        verdict,
        inputs: json!({ "f": f.coeffs() }),
        numbers: json!({
            "outer": outer,
            "atom_values": values.iter().map(|(t, v)| json!({ "theta": t, "abs_f": v })).collect::<Vec<_>>(),
        }),
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelCheck {
    pub lambda: C64,
    pub degree: usize,
    pub verdict: Verdict,
    pub last_d2: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniversalReport {
    pub b_outer: bool,
    pub b_classifier: Verdict,
    /// The classifier says cyclic exactly when `b` is outer.
    pub b_consistent: bool,
    pub kernels: Vec<KernelCheck>,
    /// Every kernel decay reads as likely cyclic.
    pub kernels_consistent: bool,
}

pub const KERNEL_DECAY_N: usize = 40;
pub const KERNEL_SAMPLES: usize = 5;

/// Checks that `b` is cyclic exactly when outer, and that reproducing
/// kernels at random points (`|lambda| <= 0.6`, fixed seed) decay like
/// cyclic vectors.
pub fn universal_cyclicity(space: &HbSpace, seed: u64) -> Result<UniversalReport> {
    let b = space.b();
    let bp = match b.as_polynomial() {
        Some(p) => p.clone(),
        None => CPoly::new(b.taylor(truncation_degree(b)?)?),
    };
    let b_outer = is_outer(b.num())?;
    let b_classifier = classify_finite_defect(space, &bp)?.verdict;
    let b_consistent = (b_classifier == Verdict::Cyclic) == b_outer;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas: Vec<C64> = (0..KERNEL_SAMPLES)
        .map(|_| C64::from_polar(0.6 * rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    let th = DecayThresholds::default();
    let kernels = par::map_slice(space.config().exec, &lambdas, |&l| -> Result<KernelCheck> {
        let k = space.kernel_element(l)?;
        let t = decay_table(space, k.poly(), KERNEL_DECAY_N)?;
        let est = estimate_from_decay(&t, &th);
        Ok(KernelCheck {
            lambda: l,
            degree: k.poly().degree().unwrap_or(0),
            verdict: est.verdict,
            last_d2: t.last().unwrap_or(f64::NAN),
            reason: est.reason,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let kernels_consistent = kernels.iter().all(|k| k.verdict == Verdict::LikelyCyclic);
    Ok(UniversalReport { b_outer, b_classifier, b_consistent, kernels, kernels_consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::literal::parse_function;
    use crate::clark::poltoratski_limit;
    use crate::scalar::q;
    use proptest::prelude::*;

    fn cp(c: &[f64]) -> CPoly {
        CPoly::from_real(c)
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn dirichlet_examples() {
        let d1 = DirichletSpec::new(vec![(c(1.0), 1.0)]).unwrap();
        let n = dirichlet_norm(&d1, &cp(&[1.0, -1.0]));
        assert!((n.dirichlet - 1.0).abs() < 1e-15 && (n.total - 3.0).abs() < 1e-15);
        let n = dirichlet_norm(&d1, &CPoly::one());
        assert_eq!((n.dirichlet, n.total), (0.0, 1.0));
        let d2 = DirichletSpec::new(vec![(c(1.0), 1.0), (c(-1.0), 1.0)]).unwrap();
        let n = dirichlet_norm(&d2, &cp(&[0.0, 1.0]));
        assert!((n.dirichlet - 2.0).abs() < 1e-15 && (n.total - 3.0).abs() < 1e-15);

        assert_eq!(dirichlet_cyclic(&d1, &cp(&[1.0, 1.0])).unwrap().verdict, Verdict::Cyclic);
        assert_eq!(dirichlet_cyclic(&d1, &cp(&[1.0, -1.0])).unwrap().verdict, Verdict::NotCyclic);
        assert_eq!(dirichlet_cyclic(&d1, &cp(&[0.0, 1.0])).unwrap().verdict, Verdict::NotCyclic);
        assert_eq!(dirichlet_cyclic(&d2, &cp(&[1.0, 0.0, -1.0])).unwrap().verdict, Verdict::NotCyclic);

        assert!(DirichletSpec::new(vec![(c(0.5), 1.0)]).is_err());
        assert!(DirichletSpec::new(vec![(c(1.0), 0.0)]).is_err());
        assert!(DirichletSpec::new(vec![(c(1.0), 1.0), (c(1.0), 2.0)]).is_err());
    }

    #[test]
    fn theta_examples() {
        let cfg = Config::default();
        let m = theta_model(&parse_function("z").unwrap(), &cfg).unwrap();
        assert_eq!(m.atoms.len(), 1);
        assert!((m.atoms[0].mass - 1.0).abs() < 1e-6);
        let m = theta_model(&parse_function("z^2").unwrap(), &cfg).unwrap();
        assert_eq!(m.atoms.len(), 2);
        for a in &m.atoms {
            assert!((a.mass - 0.5).abs() < 1e-4);
        }
        assert_eq!(m.model_dim, 2);
        assert_eq!(theta_cyclic(&m, &cp(&[2.0, 1.0])).unwrap().verdict, Verdict::Cyclic);
        assert_eq!(theta_cyclic(&m, &cp(&[1.0, -1.0])).unwrap().verdict, Verdict::NotCyclic);

        let th = UnitCircleFunction::blaschke(vec![c(0.5)], c(1.0)).unwrap();
        let m = theta_model(&th, &cfg).unwrap();
        assert_eq!(m.atoms.len(), 1);
        assert!((m.atoms[0].zeta - c(1.0)).norm() < 1e-9);
        assert!((m.herglotz_at_zero - 1.0 / 3.0).abs() < 1e-12);
        assert!((m.mass_sum() - m.herglotz_at_zero).abs() < 1e-6);

        assert!(theta_model(&parse_function("2").unwrap(), &cfg).is_err());
        assert!(theta_model(&parse_function("(1+z)/2").unwrap(), &cfg).is_err());
    }

    #[test]
    fn theta_triangulation() {
        let cfg = Config::default();
        let m = theta_model(&parse_function("z").unwrap(), &cfg).unwrap();
        let s = HbSpace::new(parse_function("(1+z)/2").unwrap(), cfg).unwrap();
        for f in [vec![1.0], vec![1.0, 1.0], vec![1.0, -1.0], vec![0.0, 1.0], vec![1.0, 0.0, -1.0]] {
            let t = theta_cyclic(&m, &cp(&f)).unwrap().verdict;
            let k = classify_finite_defect(&s, &cp(&f)).unwrap().verdict;
            assert_eq!(t, k, "{f:?}");
        }
    }

    #[test]
    fn poltoratski_in_model() {
        let cfg = Config::default();
        let m = theta_model(&parse_function("z^2").unwrap(), &cfg).unwrap();
        let s = m.space(cfg).unwrap();
        let h = cp(&[1.0, -2.0, 0.5]);
        for a in &m.atoms {
            let lim = poltoratski_limit(&s, c(1.0), &h, a.zeta).unwrap();
            assert!((lim.value - h.eval(&a.zeta)).norm() < 1e-3);
        }
    }

    #[test]
    fn universal_examples() {
        let cfg = Config::default();
        let r = universal_cyclicity(&HbSpace::new(parse_function("(1+z)/2").unwrap(), cfg).unwrap(), 7).unwrap();
        assert!(r.b_outer && r.b_classifier == Verdict::Cyclic && r.b_consistent);
        assert!(r.kernels_consistent, "{:?}", r.kernels);
        for b in ["z(1+z)/2", "z/2"] {
            let r = universal_cyclicity(&HbSpace::new(parse_function(b).unwrap(), cfg).unwrap(), 7).unwrap();
            assert!(!r.b_outer && r.b_classifier == Verdict::NotCyclic && r.b_consistent);
            assert!(r.kernels_consistent, "{b}: {:?}", r.kernels);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn dirichlet_exact_matches_float(c in proptest::collection::vec(-16i64..16, 1..9), two in any::<bool>()) {
            let mut atoms = vec![(C64::new(1.0, 0.0), 1.0), (C64::new(0.6, 0.8), 0.5)];
            if two {
                atoms.push((C64::new(0.0, -1.0), 2.0));
            }
            let spec = DirichletSpec::new(atoms).unwrap();
            let f = CPoly::new(c.iter().map(|&k| C64::new(k as f64 / 8.0, 0.0)).collect());
            let fq = QPoly::new(c.iter().map(|&k| QC::new(q(k, 8), q(0, 1))).collect());
            let float = dirichlet_norm(&spec, &f);
            let (d, total) = dirichlet_norm_exact(&spec.to_exact().unwrap(), &fq).unwrap();
            prop_assert!(float.total >= 0.0 && float.dirichlet >= 0.0);
            prop_assert!((crate::scalar::ratio_to_f64(&d) - float.dirichlet).abs() <= 1e-12 * float.total.max(1.0));
            prop_assert!((crate::scalar::ratio_to_f64(&total) - float.total).abs() <= 1e-12 * float.total.max(1.0));
        }
    }
}
