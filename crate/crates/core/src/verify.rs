//! The self-check suite: acceptance criteria with fixed seeds and
//! tolerances, plus cross-route invariants. Shared by the `verify` command
//! and the acceptance test target.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::literal::parse_function;
use crate::boundary::{Arc, UnitCircleFunction};
use crate::clark::{clark_measure, hb_gram_of_v, l2_gram, poltoratski_limit};
use crate::config::Config;
use crate::cyclicity::{
    classify_finite_defect, decay_table, estimate_from_decay, necessity_check, theorem_a_check, theorem_b_check,
    theorem_c_check, DecayThresholds, Verdict,
};
use crate::error::Result;
use crate::factor::{is_outer, pythagorean_exact, pythagorean_residual};
use crate::hb::HbSpace;
use crate::models::{dirichlet_cyclic, theta_cyclic, theta_model, DirichletSpec};
use crate::poly::{CPoly, QPoly};
use crate::scalar::{q, C64, QC};
use crate::sigma::{sigma_bounds, toeplitz_kernel_sections};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        format!("{} {} {}: {} ({:.2}s)", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail, self.seconds)
    }
}

type Outcome = Result<(bool, String)>;

fn run(id: &str, name: &str, budget: Option<f64>, f: impl FnOnce() -> Outcome) -> Check {
    let t0 = Instant::now();
    let out = f();
    let seconds = t0.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match out {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(b) = budget {
        if seconds > b {
            passed = false;
            detail = format!("{detail}; over the {b}s budget");
        }
    }
    Check { id: id.into(), name: name.into(), passed, detail, seconds }
}

fn space(b: &str, cfg: Config) -> Result<HbSpace> {
    HbSpace::new(parse_function(b)?, cfg)
}

fn cp(c: &[f64]) -> CPoly {
    CPoly::from_real(c)
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn qp(c: &[(i64, i64)]) -> QPoly {
    QPoly::new(c.iter().map(|&(n, d)| QC::new(q(n, d), q(0, 1))).collect())
}

/// Outer `phi = (1 - z)/sqrt 2`.
pub fn linear_phi() -> UnitCircleFunction {
    UnitCircleFunction::polynomial(cp(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2])).expect("polynomial")
}

fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> CPoly {
    loop {
        let d = rng.random_range(0..=max_deg);
        let c: Vec<C64> = (0..=d).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let p = CPoly::new(c);
        if p.max_abs() > 0.1 {
            return p;
        }
    }
}

/// Random polynomial with every root outside the closed disk.
fn random_outer(rng: &mut ChaCha8Rng, max_deg: usize) -> CPoly {
    let d = rng.random_range(0..=max_deg);
    let rs: Vec<C64> = (0..d).map(|_| C64::from_polar(rng.random_range(1.2..3.0), rng.random_range(0.0..TAU))).collect();
    CPoly::from_roots(one(), &rs)
}

pub fn criterion_1(cfg: Config) -> Check {
    run("1", "Pythagorean identity", Some(1.0), || {
        let mut worst: f64 = 0.0;
        let mut exact_ok = true;
        for b in ["(1+z)/2", "z/2", "z(1+z)/2", "(3z+z^2)/4"] {
            let s = space(b, cfg)?;
            worst = worst.max(pythagorean_residual(s.a(), s.b(), cfg.grid.n));
            exact_ok &= s.exact().is_some_and(|ex| pythagorean_exact(&ex.mate, &ex.p));
        }
        Ok((worst < 1e-10 && exact_ok, format!("max grid error {worst:.3e}, exact identity {exact_ok}")))
    })
}

pub fn criterion_2(cfg: Config) -> Check {
    run("2", "exact mate for b = (1+z)/2", Some(1.0), || {
        let s = space("(1+z)/2", cfg)?;
        let ex = s.exact().expect("exact data for a polynomial symbol");
        let a_ok = ex.mate.numerator() == Some(qp(&[(1, 2), (-1, 2)])) && ex.mate.den == qp(&[(1, 1)]);
        let sr = ex.mate.sqrt_r().expect("rational sqrt");
        let e1 = s.element_exact(&qp(&[(1, 1)]))?;
        let mate_one = e1.exact().unwrap().scaled.scale(&QC::new(BigRational::from_integer(1.into()) / sr, q(0, 1)));
        let mate_ok = mate_one == qp(&[(-1, 1)]);
        let mut norms_ok = *e1.exact_norm_sq().unwrap() == q(2, 1);
        for k in 0..=8usize {
            let e = s.element_exact(&QPoly::monomial(k))?;
            norms_ok &= *e.exact_norm_sq().unwrap() == q(4 * k as i64 + 2, 1);
        }
        Ok((a_ok && mate_ok && norms_ok, format!("a exact {a_ok}, mate(1) = -1 {mate_ok}, norms 4k+2 {norms_ok}")))
    })
}

pub fn criterion_3(cfg: Config) -> Check {
    run("3", "kernel norm identity", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst: f64 = 0.0;
        for b in ["(1+z)/2", "z(1+z)/2"] {
            let s = space(b, cfg)?;
            for _ in 0..20 {
                let l = C64::from_polar(rng.random_range(0.0f64..0.81).sqrt(), rng.random_range(0.0..TAU));
                let via_mate = s.kernel_element(l)?.norm_sq();
                let direct = s.kernel_diagonal(l)?;
                worst = worst.max((via_mate - direct).abs() / direct);
            }
        }
        Ok((worst < 1e-8, format!("max relative gap {worst:.3e} over 40 points")))
    })
}

pub fn criterion_4(cfg: Config) -> Check {
    run("4", "Clark mass bookkeeping", Some(5.0), || {
        let mu = clark_measure(&space("z(1+z)/2", cfg)?, one())?;
        let m1 = mu.atom_mass();
        let ok1 = mu.atoms.len() == 1
            && (m1 - 2.0 / 3.0).abs() < 1e-4
            && (mu.ac_mass - 1.0 / 3.0).abs() < 1e-6
            && (m1 + mu.ac_mass - 1.0).abs() < 1e-6;
        let nu = clark_measure(&space("(1+z)/2", cfg)?, one())?;
        let m2 = nu.atom_mass();
        let ok2 = nu.atoms.len() == 1 && (m2 - 2.0).abs() < 1e-4 && (m2 + nu.ac_mass - 3.0).abs() < 1e-6;
        Ok((
            ok1 && ok2,
            format!(
                "z(1+z)/2: atom {m1:.8}, ac {:.8}; (1+z)/2: atom {m2:.8}, total {:.8}",
                mu.ac_mass,
                m2 + nu.ac_mass
            ),
        ))
    })
}

pub fn criterion_5(cfg: Config) -> Check {
    run("5", "unitarity of V", None, || {
        let s = space("z/2", cfg)?;
        let mu = clark_measure(&s, one())?;
        let g1 = hb_gram_of_v(&s, one(), 7)?;
        let g2 = l2_gram(&s, &mu, 7);
        let worst = g1
            .iter()
            .flatten()
            .zip(g2.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        Ok((worst < 1e-6, format!("max Gram entry gap {worst:.3e}")))
    })
}

pub fn criterion_6(cfg: Config) -> Check {
    run("6", "classifier vs decay", Some(30.0), || {
        let s = space("(1+z)/2", cfg)?;
        let th = DecayThresholds::default();
        let cyc = classify_finite_defect(&s, &cp(&[1.0, 1.0]))?.verdict == Verdict::Cyclic;
        let t = decay_table(&s, &cp(&[1.0, 1.0]), 60)?;
        let d60 = t.last().unwrap_or(f64::NAN);
        let dec_ok = d60 < 0.1 && t.is_monotone(1e-10) && t.entries.len() == 60;
        let not1 = classify_finite_defect(&s, &cp(&[1.0, -1.0]))?.verdict == Verdict::NotCyclic;
        let flat = decay_table(&s, &cp(&[1.0, -1.0]), 12)?;
        let flat_ok = flat.entries.iter().all(|e| (e.d2 - 2.0).abs() < 1e-9);
        let not2 = classify_finite_defect(&s, &cp(&[0.0, 1.0]))?.verdict == Verdict::NotCyclic;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut contradictions = 0;
        for _ in 0..50 {
            let f = random_poly(&mut rng, 6);
            let k = classify_finite_defect(&s, &f)?.verdict;
            let e = estimate_from_decay(&decay_table(&s, &f, 60)?, &th).verdict;
            if k.contradicts(e) {
                contradictions += 1;
            }
        }
        Ok((
            cyc && dec_ok && not1 && flat_ok && not2 && contradictions == 0,
            format!("1+z cyclic {cyc}, d60^2 = {d60:.5}; 1-z flat at 2 {flat_ok}; z not cyclic {not2}; {contradictions} contradictions in 50"),
        ))
    })
}

pub fn criterion_7(cfg: Config) -> Check {
    run("7", "Clark-atom necessity", None, || {
        let s = space("z(1+z)/2", cfg)?;
        let bad = necessity_check(&s, &cp(&[1.0, -1.0]))?;
        let witness_ok = bad.witness.is_some_and(|(al, z, _)| (al - one()).norm() < 1e-9 && (z - one()).norm() < 1e-9);
        let good = necessity_check(&s, &cp(&[1.0, 1.0]))?;
        Ok((!bad.passed && witness_ok && good.passed, format!("1-z rejected at alpha = 1, zeta = 1: {witness_ok}; 1+z passes: {}", good.passed)))
    })
}

pub fn criterion_8(cfg: Config) -> Check {
    run("8", "sigma machinery", None, || {
        let counts: Vec<usize> =
            [64, 128, 256].iter().map(|&n| toeplitz_kernel_sections(&linear_phi(), n).map(|r| r.near_kernel)).collect::<Result<_>>()?;
        let rphi = UnitCircleFunction::rational(cp(&[3f64.sqrt()]), cp(&[2.0, 1.0]))?;
        let reps = [64, 128, 256].iter().map(|&n| toeplitz_kernel_sections(&rphi, n)).collect::<Result<Vec<_>>>()?;
        let mins: Vec<f64> = reps.iter().map(|r| r.sigma_min()).collect();
        let spread = mins.iter().cloned().fold(f64::MIN, f64::max) - mins.iter().cloned().fold(f64::MAX, f64::min);
        let zero_ok = reps.iter().all(|r| r.near_kernel == 0) && spread < 1e-6 * mins[0];
        let mut nested = true;
        for b in ["(1+z)/2", "z/2", "z(1+z)/2", "(3z+z^2)/4", "z/(2+z)"] {
            nested &= sigma_bounds(&space(b, cfg)?)?.lower_within_upper(1e-8);
        }
        nested &= sigma_bounds(&HbSpace::from_phi(&linear_phi(), cfg)?)?.lower_within_upper(1e-8);
        Ok((
            counts == [1, 1, 1] && zero_ok && nested,
            format!("(1-z)/sqrt2 kernel counts {counts:?}; sqrt3/(2+z) sigma_min {mins:.6?}; lower within upper {nested}"),
        ))
    })
}

pub fn criterion_9(cfg: Config) -> Check {
    run("9", "certificates", None, || {
        let s = space("(1+z)/2", cfg)?;
        let e = [Arc::new(0.1, TAU - 0.1)?];
        let f = [Arc::new(-0.5, 0.5)?];
        let a_ok = theorem_a_check(&s, &cp(&[1.0, 1.0]), &e, &f).is_ok();
        let z2 = space("z/2", cfg)?;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut b_ok = true;
        for k in 0..10 {
            let g = if k < 3 { [cp(&[1.0, 1.0]), cp(&[1.0, -1.0]), cp(&[1.0, -2.0, 1.0])][k].clone() } else { random_outer(&mut rng, 4) };
            b_ok &= theorem_b_check(&z2, &g, &[]).is_ok();
        }
        let c = theorem_c_check(&z2, &CPoly::one())?;
        let c_ok = c.certificate.is_ok() && (c.outer.value(C64::new(0.3, -0.2)) - one()).norm() < 1e-12;
        Ok((a_ok && b_ok && c_ok, format!("arc split {a_ok}; empty cover for 10 outer f {b_ok}; V1 = 1 certified {c_ok}")))
    })
}

pub fn criterion_10(cfg: Config) -> Check {
    run("10", "model spaces", None, || {
        let d = DirichletSpec::new(vec![(one(), 1.0)])?;
        let dv: Vec<Verdict> =
            [cp(&[1.0, 1.0]), cp(&[1.0, -1.0]), cp(&[0.0, 1.0])].iter().map(|f| dirichlet_cyclic(&d, f).map(|r| r.verdict)).collect::<Result<_>>()?;
        let d_ok = dv == [Verdict::Cyclic, Verdict::NotCyclic, Verdict::NotCyclic];
        let m2 = theta_model(&parse_function("z^2")?, &cfg)?;
        let mass_ok = m2.atoms.len() == 2
            && m2.atoms.iter().all(|a| (a.mass - 0.5).abs() < 1e-4)
            && m2.atoms.iter().any(|a| (a.zeta - one()).norm() < 1e-9)
            && m2.atoms.iter().any(|a| (a.zeta + one()).norm() < 1e-9);
        let m1 = theta_model(&parse_function("z")?, &cfg)?;
        let s = space("(1+z)/2", cfg)?;
        let mut tri = true;
        for f in [cp(&[1.0]), cp(&[1.0, 1.0]), cp(&[1.0, -1.0]), cp(&[0.0, 1.0]), cp(&[1.0, 0.0, -1.0])] {
            tri &= theta_cyclic(&m1, &f)?.verdict == classify_finite_defect(&s, &f)?.verdict;
        }
        let sp = m2.space(cfg)?;
        let h = cp(&[0.5, -1.0, 2.0]);
        let mut pol: f64 = 0.0;
        for a in &m2.atoms {
            pol = pol.max((poltoratski_limit(&sp, one(), &h, a.zeta)?.value - h.eval(&a.zeta)).norm());
        }
        Ok((
            d_ok && mass_ok && tri && pol < 1e-3,
            format!("D(delta_1) verdicts {d_ok}; z^2 masses {mass_ok}; theta = z triangulation {tri}; boundary limit error {pol:.2e}"),
        ))
    })
}

pub fn criterion_11(cfg: Config) -> Check {
    run("11", "inner factors and multipliers", None, || {
        let s = space("(1+z)/2", cfg)?;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut divide_ok = true;
        let mut shift_ok = true;
        for _ in 0..20 {
            let r = C64::from_polar(rng.random_range(0.0..0.9), rng.random_range(0.0..TAU));
            let g = random_poly(&mut rng, 4);
            let f = &CPoly::new(vec![-r, one()]) * &g;
            let (fo, io) = s.divide_inner(&s.element(&f))?;
            divide_ok &= !io.is_trivial() && fo.norm_sq().is_finite() && is_outer(fo.poly())?;
            shift_ok &= classify_finite_defect(&s, &f.shift(1))?.verdict == Verdict::NotCyclic;
            shift_ok &= classify_finite_defect(&s, &io.outer.shift(1))?.verdict == Verdict::NotCyclic;
        }
        let mut mult_ok = true;
        let mut checked = 0;
        for b in ["z/2", "(1+z)/4", "(1+z)/2"] {
            let sb = space(b, cfg)?;
            if !crate::cyclicity::classify::boundary_points(&sb)?.is_empty() {
                continue;
            }
            for _ in 0..10 {
                let f = random_outer(&mut rng, 4);
                if classify_finite_defect(&sb, &f)?.verdict != Verdict::Cyclic {
                    continue;
                }
                checked += 1;
                mult_ok &= classify_finite_defect(&sb, &(sb.a_num() * &f))?.verdict == Verdict::Cyclic;
            }
        }
        Ok((
            divide_ok && shift_ok && mult_ok && checked > 0,
            format!("divide_inner {divide_ok}; z f never cyclic {shift_ok}; a f cyclic on {checked} cases {mult_ok}"),
        ))
    })
}

/// Acceptance criteria 1 to 11, in order.
pub fn acceptance(cfg: Config) -> Vec<Check> {
    vec![
        criterion_1(cfg),
        criterion_2(cfg),
        criterion_3(cfg),
        criterion_4(cfg),
        criterion_5(cfg),
        criterion_6(cfg),
        criterion_7(cfg),
        criterion_8(cfg),
        criterion_9(cfg),
        criterion_10(cfg),
        criterion_11(cfg),
    ]
}

/// Cross-route invariants beyond the acceptance list.
pub fn invariants(cfg: Config) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(run("I1", "decay tables monotone and bounded", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut ok = true;
        for b in ["(1+z)/2", "z(1+z)/2", "z/2"] {
            let s = space(b, cfg)?;
            for _ in 0..5 {
                let t = decay_table(&s, &random_poly(&mut rng, 5), 30)?;
                ok &= t.is_monotone(1e-10) && t.entries.iter().all(|e| e.d2 <= t.norm_one_sq + 1e-12);
            }
        }
        Ok((ok, format!("15 random tables monotone {ok}")))
    }));
    out.push(run("I2", "necessity failure excludes cyclic routes", None, || {
        let s = space("z(1+z)/2", cfg)?;
        let mut ok = true;
        for f in [cp(&[1.0, -1.0]), cp(&[1.0, -2.0, 1.0]), cp(&[0.0, 1.0]), cp(&[1.0, 0.0, -1.0])] {
            if !necessity_check(&s, &f)?.passed {
                ok &= classify_finite_defect(&s, &f)?.verdict != Verdict::Cyclic;
                let e = estimate_from_decay(&decay_table(&s, &f, 40)?, &DecayThresholds::default()).verdict;
                ok &= e != Verdict::LikelyCyclic;
            }
        }
        Ok((ok, format!("no route says cyclic after a necessity failure: {ok}")))
    }));
    out.push(run("I3", "certificates agree with the classifier", None, || {
        let mut ok = true;
        let s = space("(1+z)/2", cfg)?;
        let e = [Arc::new(0.2, TAU - 0.2)?];
        let f = [Arc::new(-0.3, 0.3)?];
        for g in [cp(&[1.0, 1.0]), cp(&[2.0, 1.0]), cp(&[1.0, 0.5, 0.25])] {
            if theorem_a_check(&s, &g, &e, &f).is_ok() {
                ok &= classify_finite_defect(&s, &g)?.verdict == Verdict::Cyclic;
            }
        }
        let z2 = space("z/2", cfg)?;
        for g in [cp(&[1.0, 1.0]), cp(&[1.0, -1.0]), cp(&[0.5, 1.0])] {
            if theorem_b_check(&z2, &g, &[]).is_ok() {
                ok &= classify_finite_defect(&z2, &g)?.verdict == Verdict::Cyclic;
            }
        }
        Ok((ok, format!("certificate successes confirmed: {ok}")))
    }));
    out.push(run("I4", "theta-model mass conservation", None, || {
        let mut worst: f64 = 0.0;
        for th in [
            parse_function("z")?,
            parse_function("z^3")?,
            UnitCircleFunction::blaschke(vec![C64::new(0.5, 0.0)], one())?,
            UnitCircleFunction::blaschke(vec![C64::new(0.3, 0.4), C64::new(-0.2, 0.0)], C64::new(0.0, 1.0))?,
        ] {
            let m = theta_model(&th, &cfg)?;
            worst = worst.max((m.mass_sum() - m.herglotz_at_zero).abs());
        }
        Ok((worst < 1e-6, format!("max mass defect {worst:.2e}")))
    }));
    out
}

pub fn all(cfg: Config) -> Vec<Check> {
    let mut v = acceptance(cfg);
    v.extend(invariants(cfg));
    v
}
