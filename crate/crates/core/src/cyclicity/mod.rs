//! Deciding and certifying cyclicity of polynomials in `H(b)`.
//!
//! Theorem-grade routes (finite-defect classifier, Clark-atom necessity,
//! arc and spectrum certificates) produce `cyclic` / `not_cyclic`; the
//! distance-decay table only ever produces `likely_*`.

pub mod certificates;
pub mod classify;
pub mod decay;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::hb::HbSpace;
use crate::poly::CPoly;

pub use certificates::{
    theorem_a_check, theorem_b_check, theorem_c_check, CoverItem, TheoremACertificate, TheoremBCertificate,
    TheoremCCertificate, TheoremCOutcome,
};
pub use classify::{classify_finite_defect, necessity_check, NecessityOutcome};
pub use decay::{decay_table, Backend, DecayEntry, decay_table_exact, estimate_from_decay, DecayEstimate, DecayTable, DecayThresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Cyclic,
    NotCyclic,
    LikelyCyclic,
    LikelyNotCyclic,
    Undetermined,
}

impl Verdict {
    pub fn is_theorem_grade(self) -> bool {
        matches!(self, Verdict::Cyclic | Verdict::NotCyclic)
    }

    /// Whether two verdicts say opposite things.
    pub fn contradicts(self, other: Verdict) -> bool {
        let pos = |v: Verdict| matches!(v, Verdict::Cyclic | Verdict::LikelyCyclic);
        let neg = |v: Verdict| matches!(v, Verdict::NotCyclic | Verdict::LikelyNotCyclic);
        (pos(self) && neg(other)) || (neg(self) && pos(other))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Cyclic => "cyclic",
            Verdict::NotCyclic => "not_cyclic",
            Verdict::LikelyCyclic => "likely_cyclic",
            Verdict::LikelyNotCyclic => "likely_not_cyclic",
            Verdict::Undetermined => "undetermined",
        }
    }
}

/// One piece of evidence: which rule ran, the mathematical fact it rests on,
/// its inputs and the numbers it produced.
#[derive(Debug, Clone, Serialize)]
pub struct Evidence {
    pub rule: String,
    pub basis: String,
    pub verdict: Verdict,
    pub inputs: Value,
    pub numbers: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct CyclicityReport {
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecayTable>,
}

impl CyclicityReport {
    pub fn single(e: Evidence) -> Self {
        CyclicityReport { verdict: e.verdict, evidence: vec![e], decay: None }
    }

    /// Combines evidence. Theorem-grade items decide; otherwise the
    /// heuristic verdict stands. Conflicting theorem-grade items yield
    /// `undetermined`.
    pub fn merge(items: Vec<Evidence>, decay: Option<DecayTable>) -> Self {
        let hard: Vec<Verdict> = items.iter().map(|e| e.verdict).filter(|v| v.is_theorem_grade()).collect();
        let verdict = if let Some(&first) = hard.first() {
            if hard.iter().all(|v| *v == first) {
                first
            } else {
                Verdict::Undetermined
            }
        } else {
            items
                .iter()
                .map(|e| e.verdict)
                .find(|v| *v != Verdict::Undetermined)
                .unwrap_or(Verdict::Undetermined)
        };
        CyclicityReport { verdict, evidence: items, decay }
    }
}

/// Options for [`analyze`].
#[derive(Debug, Clone, Copy)]
pub struct AnalyzeOptions {
    /// Decay table size; `None` skips the heuristic.
    pub decay_n: Option<usize>,
    pub thresholds: DecayThresholds,
    pub necessity: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { decay_n: Some(60), thresholds: DecayThresholds::default(), necessity: true }
    }
}

/// Runs the classifier, the necessity sweep and the decay heuristic on a
/// polynomial `f` and merges the evidence.
pub fn analyze(space: &HbSpace, f: &CPoly, opts: &AnalyzeOptions) -> Result<CyclicityReport> {
    let mut items = classify_finite_defect(space, f)?.evidence;
    if opts.necessity {
        items.push(necessity_check(space, f)?.evidence(f));
    }
    let mut table = None;
    if let Some(n) = opts.decay_n {
        let t = decay_table(space, f, n)?;
        items.push(decay_evidence(&t, &estimate_from_decay(&t, &opts.thresholds)));
        table = Some(t);
    }
    Ok(CyclicityReport::merge(items, table))
}

pub fn decay_evidence(table: &DecayTable, est: &DecayEstimate) -> Evidence {
    Evidence {
        rule: "distance_decay".into(),
        basis: "f is cyclic iff 1 lies in the closed span of its polynomial multiples; the trend of dist(1, span) is read heuristically".into(),
        verdict: est.verdict,
        inputs: json!({ "n_max": table.requested, "backend": table.backend }),
        numbers: json!({
            "norm_one_sq": table.norm_one_sq,
            "last_d2": table.last(),
            "entries": table.entries.len(),
            "truncated": table.truncated,
            "reason": est.reason,
            "fit": est.fit,
        }),
    }
}
