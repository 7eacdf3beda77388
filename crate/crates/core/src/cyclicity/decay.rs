//! Distance decay `d_N^2 = dist^2(1, span{f, zf, ..., z^{N-1} f})` in `H(b)`
//! and the heuristic reading of its trend.
//!
//! The table is built by an incremental, square-root-free `L D L*`
//! factorization of the Gram matrix of `z^j f`. Each new row only touches
//! the previous ones, so all `N` are produced in one pass and the sequence
//! is nonincreasing by construction (`d_{N+1}^2 = d_N^2 - |t_N|^2 / D_N`).

use serde::Serialize;

use crate::error::{HbError, Result};
use crate::hb::HbSpace;
use crate::par;
use crate::poly::{CPoly, Poly, QPoly};
use crate::scalar::{ratio_to_f64, Scalar, C64, QC};

use super::Verdict;

pub const MAX_DECAY_N: usize = 256;
const RIDGE_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Float,
    Exact,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayEntry {
    pub n: usize,
    pub d2: f64,
    /// Exact value as `p/q` when the rational backend produced it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d2_exact: Option<String>,
    /// A ridge was added to this pivot.
    pub ridge: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayTable {
    pub norm_one_sq: f64,
    pub entries: Vec<DecayEntry>,
    pub backend: Backend,
    /// The factorization hit a pivot it could not repair before `n_max`.
    pub truncated: bool,
    pub requested: usize,
}

impl DecayTable {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.d2).collect()
    }

    pub fn last(&self) -> Option<f64> {
        self.entries.last().map(|e| e.d2)
    }

    /// A table from raw values, mainly for tests and replays.
    pub fn from_values(norm_one_sq: f64, values: &[f64]) -> Self {
        DecayTable {
            norm_one_sq,
            entries: values
                .iter()
                .enumerate()
                .map(|(i, &d2)| DecayEntry { n: i + 1, d2, d2_exact: None, ridge: false })
                .collect(),
            backend: Backend::Float,
            truncated: false,
            requested: values.len(),
        }
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.entries.windows(2).all(|w| w[1].d2 <= w[0].d2 + tol)
    }
}

enum Pivot<T> {
    Use(T, bool),
    Stop,
}

/// Runs the incremental factorization. `gram[j][k] = <e_j, e_k>`,
/// `v[k] = <1, e_k>`; returns `(d_N^2, ridged)` for `N = 1..`.
fn ldl_decay<T, P>(gram: &[Vec<T>], v: &[T], norm_one_sq: T, mut pivot: P) -> (Vec<(T, bool)>, bool)
where
    T: Scalar,
    P: FnMut(T, usize) -> Pivot<T>,
{
    let n = v.len();
    let mut l: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut d: Vec<T> = Vec::with_capacity(n);
    let mut t: Vec<T> = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    let mut cur = norm_one_sq;
    for row in 0..n {
        // m[j] = <e_row, u_j>
        let mut m: Vec<T> = Vec::with_capacity(row);
        for j in 0..row {
            let mut s = gram[row][j].clone();
            for i in 0..j {
                s = s - l[j][i].conj() * m[i].clone();
            }
            m.push(s);
        }
        let mut dn = gram[row][row].clone();
        for j in 0..row {
            dn = dn - m[j].abs_sq() / d[j].clone();
        }
        let (dn, ridged) = match pivot(dn, row) {
            Pivot::Use(x, r) => (x, r),
            Pivot::Stop => return (out, true),
        };
        let lrow: Vec<T> = (0..row).map(|j| m[j].clone() / d[j].clone()).collect();
        let mut tn = v[row].clone();
        for j in 0..row {
            tn = tn - lrow[j].conj() * t[j].clone();
        }
        cur = cur - tn.abs_sq() / dn.clone();
        out.push((cur.clone(), ridged));
        l.push(lrow);
        d.push(dn);
        t.push(tn);
    }
    (out, false)
}

fn check_request(f_zero: bool, n_max: usize) -> Result<()> {
    if f_zero {
        return Err(HbError::ZeroPolynomial);
    }
    if n_max == 0 || n_max > MAX_DECAY_N {
        return Err(HbError::InvalidConfig { reason: format!("decay size {n_max} must be in 1..={MAX_DECAY_N}") });
    }
    Ok(())
}

/// Float decay table for polynomial `f`, with `N = 1..=n_max`.
///
/// A pivot below `1e-12 * trace` gets that ridge added and the entry is
/// flagged; a pivot that stays nonpositive ends the table.
pub fn decay_table(space: &HbSpace, f: &CPoly, n_max: usize) -> Result<DecayTable> {
    check_request(f.trim_rel(1e-15).is_zero(), n_max)?;
    let exec = space.config().exec;
    let els = par::map_range(exec, n_max, |j| space.element(&f.shift(j)));
    let one = space.element(&CPoly::one());
    let gram = space.gram(&els)?;
    let v: Vec<C64> = els.iter().map(|e| space.inner_product(&one, e)).collect::<Result<_>>()?;
    let norm_one_sq = one.norm_sq();
    let mut trace = 0.0;
    let (rows, truncated) = ldl_decay(&gram, &v, C64::new(norm_one_sq, 0.0), |dn, row| {
        trace += gram[row][row].re;
        let floor = RIDGE_REL * trace;
        if dn.re >= floor {
            return Pivot::Use(C64::new(dn.re, 0.0), false);
        }
        let ridged = dn.re + floor;
        if ridged > 0.0 {
            Pivot::Use(C64::new(ridged, 0.0), true)
        } else {
            Pivot::Stop
        }
    });
    let entries = rows
        .into_iter()
        .enumerate()
        .map(|(i, (d2, ridge))| DecayEntry { n: i + 1, d2: d2.re.clamp(0.0, norm_one_sq), d2_exact: None, ridge })
        .collect();
    Ok(DecayTable { norm_one_sq, entries, backend: Backend::Float, truncated, requested: n_max })
}

/// Exact decay table in Gaussian rationals; needs a space with exact data.
/// A zero pivot (exact linear dependence) ends the table.
pub fn decay_table_exact(space: &HbSpace, f: &QPoly, n_max: usize) -> Result<DecayTable> {
    check_request(f.is_zero(), n_max)?;
    let exec = space.config().exec;
    let els = par::map_range(exec, n_max, |j| space.element_exact(&f.shift(j))).into_iter().collect::<Result<Vec<_>>>()?;
    let one = space.element_exact(&Poly::one())?;
    let flat = par::map_range(exec, n_max * n_max, |idx| space.inner_product_exact(&els[idx / n_max], &els[idx % n_max]));
    let flat = flat.into_iter().collect::<Result<Vec<QC>>>()?;
    let gram: Vec<Vec<QC>> = flat.chunks(n_max).map(<[QC]>::to_vec).collect();
    let v: Vec<QC> = els.iter().map(|e| space.inner_product_exact(&one, e)).collect::<Result<_>>()?;
    let n1 = space.inner_product_exact(&one, &one)?;
    let norm_one_sq = ratio_to_f64(&n1.re);
    let (rows, truncated) = ldl_decay(&gram, &v, n1, |dn, _| {
        if num_traits::Zero::is_zero(&dn) {
            Pivot::Stop
        } else {
            Pivot::Use(dn, false)
        }
    });
    let entries = rows
        .into_iter()
        .enumerate()
        .map(|(i, (d2, _))| DecayEntry { n: i + 1, d2: d2.to_c64().re, d2_exact: Some(d2.re.to_string()), ridge: false })
        .collect();
    Ok(DecayTable { norm_one_sq, entries, backend: Backend::Exact, truncated, requested: n_max })
}

/// Thresholds of the decay heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct DecayThresholds {
    pub min_len: usize,
    /// Last value below this reads as likely cyclic.
    pub cyclic_abs: f64,
    /// Extrapolated value below this reads as likely cyclic.
    pub extrapolated: f64,
    /// Relative change over `window` entries below this is a stall...
    pub stall_rel: f64,
    /// ...provided the value is still above this floor.
    pub stall_floor: f64,
    pub window: usize,
    /// Extrapolation target as a multiple of the last `N`.
    pub horizon: f64,
    pub min_power: f64,
}

impl Default for DecayThresholds {
    fn default() -> Self {
        DecayThresholds {
            min_len: 20,
            cyclic_abs: 1e-3,
            extrapolated: 1e-4,
            stall_rel: 1e-4,
            stall_floor: 1e-2,
            window: 10,
            horizon: 1000.0,
            min_power: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum TrendFit {
    Power { exponent: f64, extrapolated: f64 },
    Exponential { rate: f64, extrapolated: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayEstimate {
    pub verdict: Verdict,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<TrendFit>,
}

/// Least-squares slope and intercept of `y` against `x`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Fits `log d = c + s x` on the tail and on its two halves. A trend that
/// slows down (second-half slope much flatter than the first) is
/// rejected: that is the signature of convergence to a positive limit.
fn steady_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let (s, c) = line_fit(x, y);
    let h = x.len() / 2;
    let (s1, _) = line_fit(&x[..h], &y[..h]);
    let (s2, _) = line_fit(&x[h..], &y[h..]);
    if s >= 0.0 || s1 >= 0.0 || s2 > 0.8 * s1 {
        return None;
    }
    Some((s, c))
}

/// Heuristic verdict from a decay table. Only ever returns `likely_*` or
/// `undetermined`.
pub fn estimate_from_decay(table: &DecayTable, th: &DecayThresholds) -> DecayEstimate {
    let vals = table.values();
    let und = |reason: String| DecayEstimate { verdict: Verdict::Undetermined, reason, fit: None };
    if vals.len() < th.min_len {
        return und(format!("table has {} entries, need {}", vals.len(), th.min_len));
    }
    let last = *vals.last().unwrap();
    if last < th.cyclic_abs {
        return DecayEstimate { verdict: Verdict::LikelyCyclic, reason: format!("d2 = {last:e} below {:e}", th.cyclic_abs), fit: None };
    }
    let w = th.window.min(vals.len() - 1);
    let before = vals[vals.len() - 1 - w];
    let rel = (before - last).abs() / before.abs().max(f64::MIN_POSITIVE);
    if rel < th.stall_rel && last > th.stall_floor {
        return DecayEstimate {
            verdict: Verdict::LikelyNotCyclic,
            reason: format!("relative change {rel:e} over last {w} entries with d2 = {last:e}"),
            fit: None,
        };
    }
    let tail = (vals.len() / 2).max(th.window);
    let start = vals.len() - tail;
    let ns: Vec<f64> = table.entries[start..].iter().map(|e| e.n as f64).collect();
    if vals[start..].iter().any(|v| *v <= 0.0) {
        return und("nonpositive entries in the tail".into());
    }
    let logs: Vec<f64> = vals[start..].iter().map(|v| v.ln()).collect();
    let n_last = *ns.last().unwrap();
    let target = th.horizon * n_last;

    let log_ns: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    if let Some((s, c)) = steady_fit(&log_ns, &logs) {
        let p = -s;
        if p > th.min_power {
            let ext = (c + s * target.ln()).exp();
            if ext < th.extrapolated {
                return DecayEstimate {
                    verdict: Verdict::LikelyCyclic,
                    reason: format!("power trend N^-{p:.3} extrapolates to {ext:e} at N = {target}"),
                    fit: Some(TrendFit::Power { exponent: p, extrapolated: ext }),
                };
            }
        }
    }
    if let Some((s, c)) = steady_fit(&ns, &logs) {
        let ext = (c + s * target).exp();
        if ext < th.extrapolated {
            return DecayEstimate {
                verdict: Verdict::LikelyCyclic,
                reason: format!("exponential trend rate {:.3e} extrapolates to {ext:e}", -s),
                fit: Some(TrendFit::Exponential { rate: -s, extrapolated: ext }),
            };
        }
    }
    und(format!("no decisive trend; last d2 = {last:e}, relative change {rel:e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::literal::parse_function;
    use crate::config::Config;
    use crate::scalar::q;
    use proptest::prelude::*;

    fn half_space() -> HbSpace {
        HbSpace::new(parse_function("(1+z)/2").unwrap(), Config::default()).unwrap()
    }

    fn cp(c: &[f64]) -> CPoly {
        CPoly::from_real(c)
    }

    #[test]
    fn orthogonal_case_is_flat() {
        let s = half_space();
        let t = decay_table(&s, &cp(&[1.0, -1.0]), 12).unwrap();
        assert_eq!(t.entries.len(), 12);
        for e in &t.entries {
            assert!((e.d2 - 2.0).abs() < 1e-9, "{}", e.d2);
        }
        let th = DecayThresholds::default();
        let long = decay_table(&s, &cp(&[1.0, -1.0]), 30).unwrap();
        assert_eq!(estimate_from_decay(&long, &th).verdict, Verdict::LikelyNotCyclic);
    }

    #[test]
    fn cyclic_case_matches_closed_form() {
        let s = half_space();
        let t = decay_table(&s, &cp(&[1.0, 1.0]), 60).unwrap();
        assert!(t.is_monotone(1e-10));
        for e in &t.entries {
            let want = 2.0 / (2.0 * e.n as f64 + 1.0);
            assert!((e.d2 - want).abs() < 1e-8, "N={} {} vs {}", e.n, e.d2, want);
        }
        assert!(t.last().unwrap() < 0.1);
        let est = estimate_from_decay(&t, &DecayThresholds::default());
        assert_eq!(est.verdict, Verdict::LikelyCyclic, "{}", est.reason);
    }

    #[test]
    fn constant_function_hits_zero() {
        let t = decay_table(&half_space(), &CPoly::one(), 20).unwrap();
        assert!(t.entries.iter().all(|e| e.d2.abs() < 1e-12));
        assert_eq!(estimate_from_decay(&t, &DecayThresholds::default()).verdict, Verdict::LikelyCyclic);
        let z = DecayTable::from_values(1.0, &[0.0; 25]);
        assert_eq!(estimate_from_decay(&z, &DecayThresholds::default()).verdict, Verdict::LikelyCyclic);
    }

    #[test]
    fn exact_backend_agrees() {
        let s = half_space();
        let f = QPoly::new(vec![QC::new(q(1, 1), q(0, 1)), QC::new(q(1, 1), q(0, 1))]);
        let t = decay_table_exact(&s, &f, 10).unwrap();
        assert_eq!(t.backend, Backend::Exact);
        for e in &t.entries {
            assert_eq!(e.d2_exact.as_deref().unwrap(), format!("2/{}", 2 * e.n + 1));
        }
        let g = QPoly::new(vec![QC::new(q(1, 1), q(0, 1)), QC::new(q(-1, 1), q(0, 1))]);
        let t = decay_table_exact(&s, &g, 8).unwrap();
        assert!(t.entries.iter().all(|e| e.d2_exact.as_deref() == Some("2")));
    }

    #[test]
    fn rejects_bad_requests() {
        let s = half_space();
        assert!(decay_table(&s, &CPoly::zero(), 5).is_err());
        assert!(decay_table(&s, &CPoly::one(), 0).is_err());
        assert!(decay_table(&s, &CPoly::one(), 300).is_err());
    }

    #[test]
    fn short_or_slowing_tables_stay_undetermined() {
        let th = DecayThresholds::default();
        let short = DecayTable::from_values(1.0, &[0.5; 10]);
        assert_eq!(estimate_from_decay(&short, &th).verdict, Verdict::Undetermined);
        // converging to 0.3: must never read as cyclic
        let vals: Vec<f64> = (1..=40).map(|n| 0.3 + 0.7 * 0.9f64.powi(n)).collect();
        let v = estimate_from_decay(&DecayTable::from_values(1.0, &vals), &th).verdict;
        assert_ne!(v, Verdict::LikelyCyclic);
        let vals: Vec<f64> = (1..=40).map(|n| 0.02 + 1.0 / n as f64).collect();
        let v = estimate_from_decay(&DecayTable::from_values(1.0, &vals), &th).verdict;
        assert_ne!(v, Verdict::LikelyCyclic);
        let vals: Vec<f64> = (1..=40).map(|n| 0.5f64.powi(n) + 1e-9).collect();
        let v = estimate_from_decay(&DecayTable::from_values(1.0, &vals), &th).verdict;
        assert_eq!(v, Verdict::LikelyCyclic);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn tables_are_monotone_and_bounded(c in proptest::collection::vec(-2.0f64..2.0, 1..6)) {
            prop_assume!(c.iter().any(|x| x.abs() > 0.1));
            let s = half_space();
            let t = decay_table(&s, &cp(&c), 24).unwrap();
            prop_assert!(t.is_monotone(1e-10));
            prop_assert!(t.entries.iter().all(|e| e.d2 <= t.norm_one_sq + 1e-12 && e.d2 >= 0.0));
        }
    }
}
