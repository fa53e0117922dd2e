//! Report serialization: versioned JSON envelopes, CSV, and plain-text
//! tables. JSON is the machine contract ("schema": "quadspec/1", byte-stable
//! for a fixed config); CSV carries the same numbers at 17 significant
//! digits, so a round trip through either format recovers identical f64s.

use serde::Serialize;
use serde_json::{json, Value};

use crate::classical::ClosureReport;
use crate::matrixrep::{MatrixRep, ResidualReport};
use crate::repsolve::{SolveOutcome, SpectrumTable};

pub const SCHEMA: &str = "quadspec/1";

/// 17 significant digits — enough to round-trip any f64 exactly.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Wrap a serializable body in the versioned envelope.
pub fn envelope<T: Serialize>(command: &str, body: &T) -> Value {
    let mut v = serde_json::to_value(body).expect("report serialization");
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), Value::String(SCHEMA.into()));
        map.insert("command".into(), Value::String(command.into()));
    }
    v
}

pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json encoding");
    s.push('\n');
    s
}

pub fn spectrum_csv(table: &SpectrumTable) -> String {
    let mut out = String::from(
        "p,branch,e,u,eps,multiple_roots,phi0_residual,phi_p1_residual,matrix_residual\n",
    );
    for r in &table.rows {
        let eps = r.eps.map(sig17).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.p,
            r.branch,
            sig17(r.e),
            sig17(r.u),
            eps,
            r.multiple_roots,
            sig17(r.phi0_residual),
            sig17(r.phi_p1_residual),
            sig17(r.matrix_residual),
        ));
    }
    out
}

pub fn spectrum_text(table: &SpectrumTable) -> String {
    let mut out = format!(
        "{:>3}  {:<6} {:>22} {:>22} {:>10} {:>10} {:>10}\n",
        "p", "branch", "E", "u", "|Phi(0)|", "|Phi(p+1)|", "matrix"
    );
    for r in &table.rows {
        out.push_str(&format!(
            "{:>3}  {:<6} {:>22.15e} {:>22.15e} {:>10.2e} {:>10.2e} {:>10.2e}{}\n",
            r.p,
            r.branch,
            r.e,
            r.u,
            r.phi0_residual,
            r.phi_p1_residual,
            r.matrix_residual,
            if r.multiple_roots {
                "  [multiple roots]"
            } else {
                ""
            }
        ));
    }
    for (branch, constraint) in &table.skipped {
        out.push_str(&format!("skipped branch {branch}: {constraint}\n"));
    }
    out
}

pub fn residual_text(label: &str, r: &ResidualReport) -> String {
    format!(
        "{label}: algebra1 {:.2e}  algebra2 {:.2e}  algebra3 {:.2e}  casimir {:.2e}  \
         forms {:.2e}  phi0 {:.2e}  phi(p+1) {:.2e}\n",
        r.algebra1, r.algebra2, r.algebra3, r.casimir, r.casimir_forms, r.phi0, r.phi_p1
    )
}

/// Row-major matrix dump (JSON numbers round-trip f64 exactly).
fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn matrices_json(rep: &MatrixRep) -> Value {
    json!({
        "dim": rep.p + 1,
        "u": rep.u,
        "e": rep.e,
        "phi": rep.phi,
        "n": matrix_rows(&rep.n),
        "lower": matrix_rows(&rep.lower),
        "raise": matrix_rows(&rep.raise),
        "a": matrix_rows(&rep.a),
        "b": matrix_rows(&rep.b),
        "c": matrix_rows(&rep.c),
    })
}

pub fn matrices_text(rep: &MatrixRep) -> String {
    let mut out = String::new();
    for (name, m) in [("A", &rep.a), ("B", &rep.b), ("C", &rep.c)] {
        out.push_str(&format!("{name} =\n"));
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|j| sig17(m[(i, j)])).collect();
            out.push_str(&format!("  [{}]\n", row.join(", ")));
        }
    }
    out
}

pub fn closure_text(report: &ClosureReport) -> String {
    format!(
        "potential {} ({} samples, seed {})\n\
         max:  {{H,A}} {:.2e}  {{H,B}} {:.2e}  {{A,C}} {:.2e}  {{B,C}} {:.2e}  casimir {:.2e}\n\
         mean: {{H,A}} {:.2e}  {{H,B}} {:.2e}  {{A,C}} {:.2e}  {{B,C}} {:.2e}  casimir {:.2e}\n",
        report.potential,
        report.samples,
        report.seed,
        report.max.ha,
        report.max.hb,
        report.max.ac,
        report.max.bc,
        report.max.casimir,
        report.mean.ha,
        report.mean.hb,
        report.mean.ac,
        report.mean.bc,
        report.mean.casimir,
    )
}

pub fn solve_text(out: &SolveOutcome) -> String {
    let mut s = String::new();
    for sol in &out.solutions {
        s.push_str(&format!(
            "u = {:.15e}  E = {:.15e}  residuals ({:.2e}, {:.2e})\n",
            sol.u, sol.e, sol.residuals.0, sol.residuals.1
        ));
    }
    for d in &out.dropped {
        s.push_str(&format!(
            "dropped (u = {:.6e}, E = {:.6e}): {}\n",
            d.u, d.e, d.reason
        ));
    }
    if out.solutions.is_empty() {
        s.push_str("no solutions in box\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig17_round_trips() {
        for &x in &[
            1.0,
            -1.0 / 18.0,
            (1.0 + 5.0_f64.sqrt()) / 2.0,
            6.02e23,
            -1.2345678901234567e-300,
        ] {
            let back: f64 = sig17(x).parse().unwrap();
            assert_eq!(back, x, "{x}");
        }
    }

    #[test]
    fn envelope_carries_schema() {
        #[derive(Serialize)]
        struct Body {
            value: f64,
        }
        let v = envelope("spectrum", &Body { value: 4.0 });
        assert_eq!(v["schema"], "quadspec/1");
        assert_eq!(v["command"], "spectrum");
        assert_eq!(v["value"], 4.0);
    }
}
