//! Polynomial roots: companion-matrix eigenvalues, Newton polishing, and
//! multiplicity clustering.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{HbError, Result};
use crate::poly::CPoly;
use crate::scalar::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub value: C64,
    pub multiplicity: usize,
}

/// All complex roots of `p` with multiplicities.
///
/// `cluster_tol` is the relative radius inside which computed eigenvalues are
/// merged unconditionally. Wider clusters are merged only when their spread
/// is explained by the backward error of a genuine multiple root.
pub fn roots(p: &CPoly, cluster_tol: f64) -> Result<Vec<Root>> {
    let p = p.trim_rel(1e-14);
    let deg = match p.degree() {
        None | Some(0) => return Err(HbError::DegreeZero),
        Some(d) => d,
    };
    // Exact zero roots.
    let zeros = p.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = CPoly::new(p.coeffs()[zeros..].to_vec());
    let mut raw: Vec<C64> = eigen_roots(&reduced)?;
    for r in raw.iter_mut() {
        *r = newton_polish(&reduced, *r, 1);
    }
    let mut out = cluster(&reduced, raw, cluster_tol);
    if zeros > 0 {
        out.push(Root { value: C64::new(0.0, 0.0), multiplicity: zeros });
    }
    debug_assert_eq!(out.iter().map(|r| r.multiplicity).sum::<usize>(), deg);
    out.sort_by(|a, b| {
        a.value
            .norm()
            .partial_cmp(&b.value.norm())
            .unwrap()
            .then(a.value.arg().partial_cmp(&b.value.arg()).unwrap())
    });
    Ok(out)
}

/// Roots listed with repetition.
pub fn roots_flat(p: &CPoly, cluster_tol: f64) -> Result<Vec<C64>> {
    Ok(roots(p, cluster_tol)?
        .into_iter()
        .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity))
        .collect())
}

fn eigen_roots(p: &CPoly) -> Result<Vec<C64>> {
    let d = match p.degree() {
        None | Some(0) => return Ok(Vec::new()),
        Some(d) => d,
    };
    let lead = p.leading();
    if d == 1 {
        return Ok(vec![-p.coeff(0) / lead]);
    }
    if d == 2 {
        let (a, b, c) = (lead, p.coeff(1), p.coeff(0));
        let disc = (b * b - a * c * 4.0).sqrt();
        // Cancellation-free pairing.
        let qq = if (b.conj() * disc).re >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
        if qq.norm() == 0.0 {
            return Ok(vec![C64::new(0.0, 0.0); 2]);
        }
        return Ok(vec![qq / a, c / qq]);
    }
    if let Some(r) = companion_eigs(p, d) {
        return Ok(r);
    }
    // Highly symmetric companion matrices can stall the QR iteration; a
    // complex shift of the variable breaks the symmetry.
    let scale = (p.coeff(0) / lead).norm().powf(1.0 / d as f64).max(1e-3);
    for k in 1..=4 {
        let s = C64::from_polar(0.1 * k as f64 * scale, 0.7 * k as f64);
        if let Some(r) = companion_eigs(&CPoly::new(taylor_at(p, s)), d) {
            return Ok(r.into_iter().map(|w| w + s).collect());
        }
    }
    Err(HbError::Numerical { reason: "companion eigenvalue iteration did not converge".into() })
}

fn companion_eigs(p: &CPoly, d: usize) -> Option<Vec<C64>> {
    let lead = p.leading();
    let mut m = DMatrix::<C64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -p.coeff(i) / lead;
    }
    balance(&mut m);
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 100_000)?;
    let (_, t) = schur.unpack();
    let mut out = Vec::with_capacity(d);
    let mut i = 0;
    while i < d {
        if i + 1 < d && t[(i + 1, i)].norm() > 0.0 {
            // Residual 2x2 block.
            let (a, b, c, e) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let tr = a + e;
            let det = a * e - b * c;
            let disc = (tr * tr - det * 4.0).sqrt();
            out.push((tr + disc) * 0.5);
            out.push((tr - disc) * 0.5);
            i += 2;
        } else {
            out.push(t[(i, i)]);
            i += 1;
        }
    }
    Some(out)
}

/// Diagonal similarity balancing (Parlett-Reinsch, radix 2).
fn balance(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].norm();
                    r += m[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let mut rr = r;
            while cc < rr / 2.0 {
                cc *= 2.0;
                rr /= 2.0;
                f *= 2.0;
            }
            while cc >= rr * 2.0 {
                cc /= 2.0;
                rr *= 2.0;
                f /= 2.0;
            }
            if (cc + rr) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Taylor coefficients of `p` about `c`: `p(z) = sum t_j (z-c)^j`.
pub fn taylor_at(p: &CPoly, c: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(p.len());
    let mut cur = p.clone();
    while !cur.is_zero() {
        let (q, r) = cur.deflate(&c);
        out.push(r);
        cur = q;
    }
    out
}

/// Newton iteration on the `(m-1)`-th derivative, the natural simple-root
/// target for a root of multiplicity `m`.
fn newton_polish(p: &CPoly, start: C64, multiplicity: usize) -> C64 {
    let mut g = p.clone();
    for _ in 1..multiplicity {
        g = g.derivative();
    }
    let dg = g.derivative();
    let mut z = start;
    let mut best = g.eval(&z).norm();
    for _ in 0..50 {
        let gv = g.eval(&z);
        let dv = dg.eval(&z);
        if dv.norm() == 0.0 || gv.norm() == 0.0 {
            break;
        }
        let next = z - gv / dv;
        let nv = g.eval(&next).norm();
        if !(nv < best) {
            break;
        }
        let step = (next - z).norm();
        z = next;
        best = nv;
        if step <= 1e-17 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

struct Cluster {
    members: Vec<C64>,
}

impl Cluster {
    fn center(&self) -> C64 {
        self.members.iter().sum::<C64>() / self.members.len() as f64
    }
    fn spread(&self) -> f64 {
        let c = self.center();
        self.members.iter().map(|m| (m - c).norm()).fold(0.0, f64::max)
    }
}

/// Radius within which a multiplicity-`m` root at `c` can scatter under a
/// relative coefficient perturbation of order machine epsilon.
fn backward_spread(p: &CPoly, c: C64, m: usize) -> f64 {
    let t = taylor_at(p, c);
    let tm = t.get(m).copied().unwrap_or_default().norm();
    if tm == 0.0 {
        return f64::INFINITY;
    }
    let scale: f64 = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm() * c.norm().max(1.0).powi(k as i32))
        .sum();
    let eps = 1e-15 * scale;
    100.0 * (eps / tm).powf(1.0 / m as f64)
}

fn cluster(p: &CPoly, raw: Vec<C64>, tol: f64) -> Vec<Root> {
    let mut clusters: Vec<Cluster> = raw.into_iter().map(|r| Cluster { members: vec![r] }).collect();
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let d = (clusters[i].center() - clusters[j].center()).norm();
                if best.is_none_or(|(_, _, bd)| d < bd) {
                    best = Some((i, j, d));
                }
            }
        }
        let Some((i, j, _)) = best else { break };
        let mut merged: Vec<C64> = clusters[i].members.clone();
        merged.extend(clusters[j].members.iter().copied());
        let cand = Cluster { members: merged };
        let c = cand.center();
        let m = cand.members.len();
        let scale = c.norm().max(1.0);
        let accept = cand.spread() <= tol * scale || cand.spread() <= backward_spread(p, c, m);
        if !accept {
            break;
        }
        clusters.swap_remove(j);
        clusters[i] = cand;
    }
    clusters
        .into_iter()
        .map(|cl| {
            let m = cl.members.len();
            let c = cl.center();
            let value = if m > 1 { newton_polish(p, c, m) } else { c };
            Root { value, multiplicity: m }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(lead: C64, rs: &[Root]) -> CPoly {
        let flat: Vec<C64> =
            rs.iter().flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity)).collect();
        CPoly::from_roots(lead, &flat)
    }

    #[test]
    fn symmetric_double_roots() {
        // z^4 - 2 z^2 + 1 stalls unshifted QR.
        let r = roots(&CPoly::from_real(&[1.0, 0.0, -2.0, 0.0, 1.0]), 1e-7).unwrap();
        assert_eq!(r.len(), 2);
        for x in &r {
            assert_eq!(x.multiplicity, 2);
            assert!((x.value.norm() - 1.0).abs() < 1e-10 && x.value.im.abs() < 1e-10);
        }
    }

    #[test]
    fn simple_linear() {
        let r = roots(&CPoly::from_real(&[1.0, -1.0]), 1e-7).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 1);
        assert!((r[0].value - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn double_root_clusters() {
        let r = roots(&CPoly::from_real(&[1.0, -2.0, 1.0]), 1e-7).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].value - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn factor_two_minus_z_minus_z2() {
        let r = roots(&CPoly::from_real(&[2.0, -1.0, -1.0]), 1e-7).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].value - C64::new(1.0, 0.0)).norm() < 1e-13);
        assert!((r[1].value - C64::new(-2.0, 0.0)).norm() < 1e-13);
        assert!(r.iter().all(|x| x.multiplicity == 1));
    }

    #[test]
    fn degree_zero_rejected() {
        assert_eq!(roots(&CPoly::from_real(&[3.0]), 1e-7), Err(HbError::DegreeZero));
        assert_eq!(roots(&CPoly::zero(), 1e-7), Err(HbError::DegreeZero));
    }

    #[test]
    fn higher_multiplicity_on_circle() {
        // (1 - z)^3 (z + 2i)
        let base = CPoly::from_real(&[1.0, -1.0]);
        let p = &(&(&base * &base) * &base) * &CPoly::new(vec![C64::new(0.0, 2.0), C64::new(1.0, 0.0)]);
        let r = roots(&p, 1e-7).unwrap();
        let triple = r.iter().find(|x| x.multiplicity == 3).expect("triple root");
        assert!((triple.value - C64::new(1.0, 0.0)).norm() < 1e-8);
        let back = expand(p.leading(), &r);
        assert!(back.max_diff(&p) < 1e-8 * p.max_abs());
    }

    #[test]
    fn close_distinct_roots_stay_separate() {
        let p = CPoly::from_roots(C64::new(1.0, 0.0), &[C64::new(0.5, 0.0), C64::new(0.5001, 0.0)]);
        let r = roots(&p, 1e-7).unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn zero_roots_exact() {
        let p = CPoly::from_real(&[0.0, 0.0, 1.0, 1.0]);
        let r = roots(&p, 1e-7).unwrap();
        assert_eq!(r[0].value, C64::new(0.0, 0.0));
        assert_eq!(r[0].multiplicity, 2);
    }
}
