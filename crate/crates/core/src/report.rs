//! JSON and CSV rendering of reports.
//!
//! Every writer is deterministic: no hash-ordered containers reach the
//! output and floats use the shortest round-trip representation.
//!
//! CSV schemas:
//!
//! * entanglement: `bipartition,part_a,part_b,alpha,E`
//! * robustness:   `n,p_L_num,p_L_den,p_L,p_tilde_L_num,p_tilde_L_den,p_tilde_L`
//! * campaign:     `index,n,edges,k_max,bound_num,bound_den,measured_E,holds,certificates_validated`
//! * settings:     `setting`
//!
//! Vertex lists inside a CSV field are `;`-separated. Irrational values
//! leave the `_num`/`_den` columns empty.

use serde::Serialize;

use crate::entanglement::EntanglementReport;
use crate::error::{Error, Result};
use crate::measurement::SettingReport;
use crate::random::CampaignReport;
use crate::scalar::Scalar;
use crate::witness::RobustnessRow;

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn join(vs: &[usize]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

fn fraction_fields(s: Scalar) -> [String; 3] {
    match s {
        Scalar::Exact(r) => [r.numer().to_string(), r.denom().to_string(), s.to_f64().to_string()],
        Scalar::Approx(v) => [String::new(), String::new(), v.to_string()],
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn entanglement_csv(r: &EntanglementReport) -> Result<String> {
    let mut w = writer();
    w.write_record(["bipartition", "part_a", "part_b", "alpha", "E"]).map_err(csv_err)?;
    for b in &r.per_bipartition {
        let bp = &b.bipartition;
        w.write_record([bp.to_string(), join(bp.part_a()), join(&bp.part_b()), b.alpha.to_string(), (1.0 - b.alpha).to_string()])
            .map_err(csv_err)?;
    }
    finish(w)
}

pub fn robustness_csv(rows: &[RobustnessRow]) -> Result<String> {
    let mut w = writer();
    w.write_record(["n", "p_L_num", "p_L_den", "p_L", "p_tilde_L_num", "p_tilde_L_den", "p_tilde_L"]).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.n.to_string()];
        rec.extend(fraction_fields(r.p_l));
        rec.extend(fraction_fields(r.p_tilde_l));
        w.write_record(rec).map_err(csv_err)?;
    }
    finish(w)
}

pub fn campaign_csv(r: &CampaignReport) -> Result<String> {
    let mut w = writer();
    w.write_record(["index", "n", "edges", "k_max", "bound_num", "bound_den", "measured_E", "holds", "certificates_validated"])
        .map_err(csv_err)?;
    for row in &r.rows {
        let [num, den, _] = fraction_fields(row.bound);
        let edges = row.hypergraph.edge_list().iter().map(|e| join(e)).collect::<Vec<_>>().join(" ");
        let certs = row.certificates_validated.map(|b| b.to_string()).unwrap_or_default();
        w.write_record([
            row.index.to_string(),
            row.hypergraph.n().to_string(),
            edges,
            row.k_max.to_string(),
            num,
            den,
            row.measured_e.to_string(),
            row.holds.to_string(),
            certs,
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

pub fn settings_csv(r: &SettingReport) -> Result<String> {
    let mut w = writer();
    w.write_record(["setting"]).map_err(csv_err)?;
    for s in &r.settings {
        w.write_record([s.word()]).map_err(csv_err)?;
    }
    finish(w)
}
