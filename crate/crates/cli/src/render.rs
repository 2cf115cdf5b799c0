//! Exact JSON and CSV renderings of engine results. Keys are kept in sorted
//! maps so the output is byte-deterministic.

use std::collections::BTreeMap;

use chiral_lg::modfun::Vector;
use chiral_lg::{CohomologyTable, ComplexDims, Monomial, State, TorusWeights, TruncatedSeries};
use serde_json::{json, Map, Value};

fn dims_map(m: &BTreeMap<i64, usize>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

pub fn complex(d: &ComplexDims) -> Value {
    json!({ "chains": dims_map(&d.chains), "cohomology": dims_map(&d.cohomology), "euler": d.euler() })
}

pub fn torus_weights(w: &TorusWeights) -> Value {
    json!({ "x": w.x(), "phi": w.phi(), "psi": w.psi() })
}

pub fn table(t: &CohomologyTable) -> Value {
    let weights: Vec<Value> = t
        .weights
        .iter()
        .map(|w| {
            let pieces: Map<String, Value> = w.pieces.iter().map(|(k, d)| (k.to_string(), complex(d))).collect();
            json!({
                "weight": w.weight,
                "total": complex(&w.total),
                "pieces": pieces,
                "stable": w.stable,
            })
        })
        .collect();
    json!({
        "kind": format!("{:?}", t.kind).to_lowercase(),
        "step": t.step,
        "torus_weights": torus_weights(t.truncation.weights()),
        "torus_cap": t.truncation.torus_cap(),
        "weights": weights,
        "stabilized": t.stabilized(),
        "euler_poincare": t.euler_poincare_holds(),
        "notes": t.notes,
    })
}

fn bound(b: i64) -> Value {
    if b == i64::MIN || b == i64::MAX {
        Value::Null
    } else {
        json!(b)
    }
}

/// `{"qmax", "zwindow", "rows": {"n": {"e": "c"}}, "exact_windows": {"n": [lo, hi]}}`,
/// coefficients as decimal strings; an open window end is `null`.
pub fn series(s: &TruncatedSeries, z_window: (i64, i64)) -> Value {
    let mut rows = Map::new();
    let mut windows = Map::new();
    for (n, row) in s.rows().iter().enumerate() {
        let coeffs: Map<String, Value> =
            row.coefficients().iter().map(|(e, c)| (e.to_string(), Value::String(c.to_string()))).collect();
        rows.insert(n.to_string(), Value::Object(coeffs));
        let (lo, hi) = row.window();
        windows.insert(n.to_string(), json!([bound(lo), bound(hi)]));
    }
    json!({ "qmax": s.q_max(), "zwindow": [z_window.0, z_window.1], "rows": rows, "exact_windows": windows })
}

pub fn state(s: &State, dim: usize) -> Value {
    let terms: Vec<Value> =
        s.terms().map(|(m, c)| json!({ "coeff": c.to_string(), "monomial": m.to_text(dim) })).collect();
    Value::Array(terms)
}

pub fn monomial(m: &Monomial, dim: usize) -> Value {
    Value::String(m.to_text(dim))
}

pub fn module_vector(v: &Vector, labels: &dyn Fn(usize) -> String) -> Value {
    let terms: Vec<Value> = v
        .iter()
        .map(|((m, b), c)| json!({ "coeff": c.to_string(), "monomial": m.to_text(1), "base": labels(*b) }))
        .collect();
    Value::Array(terms)
}

/// CSV with a header; every field is an integer or a bare token.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn table_csv(t: &CohomologyTable) -> String {
    let mut rows = Vec::new();
    for w in &t.weights {
        for (deg, chains) in &w.total.chains {
            let h = w.total.cohomology.get(deg).copied().unwrap_or(0);
            rows.push(vec![w.weight.to_string(), deg.to_string(), chains.to_string(), h.to_string(), w.stable.to_string()]);
        }
    }
    csv(&["weight", "degree", "chain_dim", "cohomology_dim", "stable"], &rows)
}

pub fn series_csv(s: &TruncatedSeries) -> String {
    let mut rows = Vec::new();
    for (n, row) in s.rows().iter().enumerate() {
        for (e, c) in row.coefficients() {
            rows.push(vec![n.to_string(), e.to_string(), c.to_string()]);
        }
    }
    csv(&["q", "z", "coeff"], &rows)
}
