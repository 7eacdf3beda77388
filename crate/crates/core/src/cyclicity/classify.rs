//! Theorem-grade routes for rational `b`: the finite-defect classifier and
//! the Clark-atom necessity sweep.

use serde::Serialize;
use serde_json::json;

use crate::boundary::angle_of;
use crate::clark::{alpha_grid, clark_atoms};
use crate::error::Result;
use crate::factor::is_outer;
use crate::hb::HbSpace;
use crate::par;
use crate::poly::CPoly;
use crate::scalar::C64;

use super::{CyclicityReport, Evidence, Verdict};

/// Equispaced part of the alpha sweep used by the necessity check.
pub const NECESSITY_ALPHAS: usize = 64;

/// Point value threshold below which `f` counts as vanishing.
pub const POINT_ZERO_TOL: f64 = 1e-9;

fn coeffs_json(f: &CPoly) -> serde_json::Value {
    json!(f.coeffs())
}

/// Distinct unimodular zeros of the mate `a`.
pub fn boundary_points(space: &HbSpace) -> Result<Vec<C64>> {
    let tol = space.config().circle_tol.max(1e-6);
    Ok(space.a().circle_zeros(tol)?.into_iter().map(|r| r.value / r.value.norm()).collect())
}

/// Cyclicity of a polynomial `f` for rational `b` with finitely many
/// boundary points: cyclic iff `f` is outer and `f(lambda_j) != 0` at every
/// unimodular zero `lambda_j` of `a`.
pub fn classify_finite_defect(space: &HbSpace, f: &CPoly) -> Result<CyclicityReport> {
    let outer = is_outer(f)?;
    let lambdas = boundary_points(space)?;
    let values: Vec<(C64, f64)> = lambdas.iter().map(|&l| (l, f.eval(&l).norm())).collect();
    let vanishing: Vec<f64> = values.iter().filter(|(_, v)| *v <= POINT_ZERO_TOL).map(|(l, _)| angle_of(*l)).collect();
    let verdict = if outer && vanishing.is_empty() { Verdict::Cyclic } else { Verdict::NotCyclic };
    let reason = if !outer {
        "f has a zero in the open disk, so it is not outer".to_string()
    } else if !vanishing.is_empty() {
        format!("f vanishes at boundary point(s) with angle {vanishing:?}")
    } else {
        "f is outer and nonzero at every boundary point".to_string()
    };
    Ok(CyclicityReport::single(Evidence {
        rule: "finite_defect_classifier".into(),
        basis: "for rational non-extreme b, a polynomial f is cyclic iff it is outer and nonzero at the unimodular zeros of the mate a".into(),
        verdict,
        inputs: json!({ "f": coeffs_json(f) }),
        numbers: json!({
            "outer": outer,
            "boundary_points": values.iter().map(|(l, v)| json!({ "zeta": l, "theta": angle_of(*l), "abs_f": v })).collect::<Vec<_>>(),
            "reason": reason,
        }),
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct NecessityOutcome {
    pub passed: bool,
    pub outer: bool,
    /// `(alpha, zeta, |f(zeta)|)` for the first vanishing atom found.
    pub witness: Option<(C64, C64, f64)>,
    pub alphas_swept: usize,
    pub atoms_checked: usize,
}

impl NecessityOutcome {
    pub fn evidence(&self, f: &CPoly) -> Evidence {
        let verdict = if self.passed { Verdict::Undetermined } else { Verdict::NotCyclic };
        Evidence {
            rule: "clark_atom_necessity".into(),
            basis: "a cyclic f must be outer and nonzero at every atom of every Clark measure".into(),
            verdict,
            inputs: json!({ "f": coeffs_json(f), "alphas": self.alphas_swept }),
            numbers: json!({
                "passed": self.passed,
                "outer": self.outer,
                "atoms_checked": self.atoms_checked,
                "witness": self.witness.map(|(al, z, v)| json!({
                    "alpha": al, "alpha_angle": angle_of(al), "zeta": z, "theta": angle_of(z), "abs_f": v
                })),
            }),
        }
    }
}

/// Sweeps the alpha grid; fails on the first Clark atom where `f`
/// vanishes, or when `f` is not outer. A pass is not a cyclicity proof.
pub fn necessity_check(space: &HbSpace, f: &CPoly) -> Result<NecessityOutcome> {
    let outer = is_outer(f)?;
    let alphas = alpha_grid(space, NECESSITY_ALPHAS)?;
    let per_alpha = par::map_slice(space.config().exec, &alphas, |&al| clark_atoms(space, al));
    let mut atoms_checked = 0;
    let mut witness = None;
    for (al, atoms) in alphas.iter().zip(per_alpha) {
        for at in atoms? {
            atoms_checked += 1;
            let v = f.eval(&at.zeta).norm();
            if v < POINT_ZERO_TOL && witness.is_none() {
                witness = Some((*al, at.zeta, v));
            }
        }
    }
    Ok(NecessityOutcome { passed: outer && witness.is_none(), outer, witness, alphas_swept: alphas.len(), atoms_checked })
}
