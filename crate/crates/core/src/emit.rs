//! Plot-ready CSV tables and the one-document-per-run JSON report.

use serde::Serialize;
use serde_json::{json, Value};

use crate::boundary::angle_of;
use crate::clark::{density_samples, ClarkMeasure};
use crate::config::Config;
use crate::cyclicity::{DecayEstimate, DecayTable};
use crate::error::{HbError, Result};
use crate::sigma::ToeplitzSectionReport;

fn csv_error(e: impl std::fmt::Display) -> HbError {
    HbError::Numerical { reason: format!("csv: {e}") }
}

fn write_rows<R: Serialize>(header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    String::from_utf8(w.into_inner().map_err(csv_error)?).map_err(csv_error)
}

/// `alpha_angle,type,theta,value`: `ac` rows carry the density, `atom`
/// rows the mass.
pub fn clark_csv(mu: &ClarkMeasure, samples: usize) -> Result<String> {
    let al = angle_of(mu.alpha);
    let ac = density_samples(mu, samples).into_iter().map(|(t, v)| (al, "ac", t, v));
    let atoms = mu.atoms.iter().map(|a| (al, "atom", a.theta, a.mass));
    write_rows(&["alpha_angle", "type", "theta", "value"], ac.chain(atoms).collect::<Vec<_>>())
}

/// `N,k,sigma_k` with `k` counting singular values upward from 1.
pub fn sections_csv(reports: &[ToeplitzSectionReport]) -> Result<String> {
    let rows = reports
        .iter()
        .flat_map(|r| r.singular_values.iter().enumerate().map(move |(k, s)| (r.n, k + 1, *s)))
        .collect::<Vec<_>>();
    write_rows(&["N", "k", "sigma_k"], rows)
}

/// `N,d2` (plus `d2_exact` for exact tables), followed by a `# verdict:`
/// comment line when an estimate is given.
pub fn decay_csv(table: &DecayTable, est: Option<&DecayEstimate>) -> Result<String> {
    let exact = table.entries.iter().any(|e| e.d2_exact.is_some());
    let mut s = if exact {
        let rows = table.entries.iter().map(|e| (e.n, e.d2, e.d2_exact.clone().unwrap_or_default()));
        write_rows(&["N", "d2", "d2_exact"], rows.collect::<Vec<_>>())?
    } else {
        write_rows(&["N", "d2"], table.entries.iter().map(|e| (e.n, e.d2)))?
    };
    if let Some(e) = est {
        s.push_str(&format!("# verdict: {}\n", e.verdict.as_str()));
    }
    Ok(s)
}

/// One report document: command, inputs, config, result body.
pub fn report(command: &str, inputs: Value, cfg: &Config, body: impl Serialize) -> Result<String> {
    let doc = json!({
        "command": command,
        "inputs": inputs,
        "config": cfg,
        "result": serde_json::to_value(body).map_err(|e| HbError::Numerical { reason: e.to_string() })?,
    });
    serde_json::to_string_pretty(&doc).map_err(|e| HbError::Numerical { reason: e.to_string() })
}
