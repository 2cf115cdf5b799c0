//! Batch front-end: read a problem specification, run one computation and
//! produce a deterministic result document.

pub mod render;
pub mod spec;

use std::fmt;

use chiral_lg::{
    check_anticommute, check_epsilon, check_nilpotent, chi_closed_form, chi_van, chiral_de_rham, cohomology_dims,
    compare, enumerate_basis, euler_series, induce, instantiate_charge, potential_charge, residue_charge,
    singular_vectors, BasisQuery, CheckReport, Comparison, Side, State, TruncatedModule, ZeroModeModule,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use spec::ProblemSpec;

/// The conventions every result depends on; their hash is stamped on each
/// result document.
pub const CONVENTIONS: &str = include_str!("conventions.txt");

const HYPERCOHOMOLOGY_NOTE: &str =
    "affine space: hypercohomology is computed as the cohomology of the global-section complex";

pub fn conventions_hash() -> String {
    let digest = Sha256::digest(CONVENTIONS.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Basis,
    Char,
    ThetaCheck,
    Cohomology,
    ChiVan,
    Nilpotency,
    Anticommute,
    ReconstructCheck,
    Singular,
    EpsilonCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Basis => "basis",
            Command::Char => "char",
            Command::ThetaCheck => "theta-check",
            Command::Cohomology => "cohomology",
            Command::ChiVan => "chi-van",
            Command::Nilpotency => "nilpotency",
            Command::Anticommute => "anticommute",
            Command::ReconstructCheck => "reconstruct-check",
            Command::Singular => "singular",
            Command::EpsilonCheck => "epsilon-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Oracle {
    Theta,
    #[default]
    None,
}

/// Why a run could not produce a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// The input is malformed or inconsistent (exit 2).
    Invalid { field: String, message: String },
    /// The computation itself found a violation (exit 1).
    Check { message: String, witness: Option<String> },
}

impl CliError {
    pub fn invalid(field: &str, message: impl Into<String>) -> Self {
        CliError::Invalid { field: field.to_string(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => 2,
            CliError::Check { .. } => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid { field, message } => write!(f, "invalid input at `{field}`: {message}"),
            CliError::Check { message, .. } => write!(f, "check failed: {message}"),
        }
    }
}

impl From<chiral_lg::Error> for CliError {
    fn from(e: chiral_lg::Error) -> Self {
        use chiral_lg::Error as E;
        match &e {
            E::NotNilpotent { witness } => CliError::Check { message: e.to_string(), witness: Some(witness.clone()) },
            E::NotClosed(w) => CliError::Check { message: e.to_string(), witness: Some(w.clone()) },
            E::JacobiFailure { .. } | E::NotAntisymmetric { .. } => CliError::Check { message: e.to_string(), witness: None },
            _ => CliError::invalid("spec", e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// A computation without a built-in verdict.
    Done,
    Pass,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Done | Status::Pass => 0,
            Status::Fail => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Done => "done",
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// The deterministic part of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub payload: Value,
    pub stabilized: Option<bool>,
    pub csv: String,
}

impl Outcome {
    fn new(status: Status, payload: Value, csv: String) -> Self {
        Outcome { status, payload, stabilized: None, csv }
    }

    fn failed(e: CliError) -> Self {
        let CliError::Check { message, witness } = e else { unreachable!("only check failures become outcomes") };
        let payload = json!({ "error": message, "witness": witness });
        let csv = render::csv(&["status", "witness"], &[vec!["fail".into(), witness.unwrap_or_default()]]);
        Outcome::new(Status::Fail, payload, csv)
    }
}

/// Runs one command. Check failures found by the engine become a failing
/// outcome with the witness; malformed input is an error.
pub fn run(command: Command, spec: &ProblemSpec, oracle: Oracle) -> Result<Outcome, CliError> {
    let result = match command {
        Command::Basis => basis(spec),
        Command::Char => character(spec, oracle == Oracle::Theta),
        Command::ThetaCheck => character(spec, true),
        Command::Cohomology => cohomology(spec),
        Command::ChiVan => chi(spec),
        Command::Nilpotency => nilpotency(spec),
        Command::Anticommute => anticommute(spec),
        Command::ReconstructCheck => reconstruct(spec),
        Command::Singular => singular(spec),
        Command::EpsilonCheck => epsilon(spec),
    };
    match result {
        Err(e @ CliError::Check { .. }) => Ok(Outcome::failed(e)),
        other => other,
    }
}

/// The full result document. Everything except `meta` depends only on the
/// command and the spec.
pub fn document(command: Command, spec: &ProblemSpec, outcome: &Outcome, elapsed_ms: u128, threads: usize) -> Value {
    json!({
        "command": command.name(),
        "spec": serde_json::to_value(spec).expect("spec serializes"),
        "status": outcome.status.name(),
        "exit_code": outcome.status.exit_code(),
        "stabilized": outcome.stabilized,
        "payload": outcome.payload,
        "meta": {
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "conventions_sha256": conventions_hash(),
            "elapsed_ms": elapsed_ms as u64,
            "threads": threads,
        },
    })
}

fn basis(spec: &ProblemSpec) -> Result<Outcome, CliError> {
    let space = spec.space()?;
    let (w_max, cap) = (spec.weight_max()?, spec.x0_cap()?);
    let mut weights = Vec::new();
    let mut rows = Vec::new();
    for w in 0..=w_max {
        let monomials = enumerate_basis(&space, w, &BasisQuery::new().x0_cap(cap))?;
        let mut by_degree = std::collections::BTreeMap::<i64, usize>::new();
        for m in &monomials {
            *by_degree.entry(m.degree()).or_default() += 1;
        }
        for (deg, n) in &by_degree {
            rows.push(vec![w.to_string(), deg.to_string(), n.to_string()]);
        }
        let by_degree: serde_json::Map<String, Value> = by_degree.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        let listed: Vec<Value> = monomials.iter().map(|m| render::monomial(m, spec.dim)).collect();
        weights.push(json!({ "weight": w, "count": monomials.len(), "by_degree": by_degree, "monomials": listed }));
    }
    let csv = render::csv(&["weight", "degree", "count"], &rows);
    Ok(Outcome::new(Status::Done, json!({ "weights": weights }), csv))
}

/// `d` for a potential `c·z^{d+1}` on the line.
fn power_degree(spec: &ProblemSpec) -> Result<u32, CliError> {
    let f = spec.potential()?.ok_or_else(|| CliError::invalid("potential", "the closed form needs f = z^(d+1)"))?;
    let terms: Vec<_> = f.terms().collect();
    match (spec.dim, terms.as_slice()) {
        (1, [(exps, _)]) if exps[0] >= 2 => Ok(exps[0] - 1),
        _ => Err(CliError::invalid("potential", "the closed form covers f = z^(d+1) on the line with d >= 1")),
    }
}

fn character(spec: &ProblemSpec, with_oracle: bool) -> Result<Outcome, CliError> {
    let space = spec.space()?;
    let (q_max, window) = (spec.q_max()?, spec.z_window()?);
    let weights = spec.torus_weights()?;
    let series = euler_series(&space, q_max, window, &weights)?;
    let mut payload = json!({ "torus_weights": render::torus_weights(&weights), "series": render::series(&series, window) });
    let mut csv = render::series_csv(&series);
    if !with_oracle {
        return Ok(Outcome::new(Status::Done, payload, csv));
    }
    let d = power_degree(spec)?;
    let closed = chi_closed_form(d, q_max, window)?;
    let verdict = compare(&series, &closed)?;
    let (status, report) = match &verdict {
        Comparison::Equal { windows } => {
            let rows: Vec<Value> = windows
                .iter()
                .enumerate()
                .map(|(q, (lo, hi))| json!({ "q": q, "window": [lo, hi], "equal": true }))
                .collect();
            (Status::Pass, json!({ "equal": true, "rows": rows }))
        }
        Comparison::Mismatch { q, z, left, right } => (
            Status::Fail,
            json!({ "equal": false, "witness": { "q": q, "z": z, "brute_force": left.to_string(), "closed_form": right.to_string() } }),
        ),
    };
    payload["oracle"] = json!({ "name": "theta", "d": d, "closed_form": render::series(&closed, window), "comparison": report });
    if status == Status::Fail {
        csv.push_str(&format!("# mismatch: {verdict:?}\n"));
    }
    Ok(Outcome::new(status, payload, csv))
}

fn cohomology(spec: &ProblemSpec) -> Result<Outcome, CliError> {
    let charge = spec.require_charge()?;
    let table = cohomology_dims(&charge, &spec.space()?, spec.weight_max()?, &spec.truncation()?)?;
    let payload = json!({ "table": render::table(&table), "metadata": HYPERCOHOMOLOGY_NOTE });
    let mut out = Outcome::new(Status::Done, payload, render::table_csv(&table));
    out.stabilized = Some(table.stabilized());
    Ok(out)
}

fn chi(spec: &ProblemSpec) -> Result<Outcome, CliError> {
    let charge = spec.require_charge()?;
    let trunc = spec.truncation()?;
    let result = chi_van(&charge, &spec.space()?, spec.weight_max()?, &trunc)?;
    let window = spec.caps.z_window.unwrap_or((i64::from(i32::MIN), trunc.torus_cap()));
    let payload = json!({
        "series": render::series(&result.series.restrict(window.0, window.1), window),
        "table": render::table(&result.table),
        "metadata": HYPERCOHOMOLOGY_NOTE,
    });
    let mut out = Outcome::new(Status::Done, payload, render::series_csv(&result.series));
    out.stabilized = Some(result.stabilized());
    Ok(out)
}

fn report(r: CheckReport, dim: usize, extra: Value) -> Outcome {
    let (status, mut payload, row) = match r {
        CheckReport::Pass { checked } => (Status::Pass, json!({ "checked": checked }), vec!["pass".into(), checked.to_string(), String::new()]),
        CheckReport::Fail { witness, image } => (
            Status::Fail,
            json!({ "witness": render::monomial(&witness, dim), "image": render::state(&image, dim) }),
            vec!["fail".into(), String::new(), witness.to_text(dim)],
        ),
    };
    if let (Value::Object(p), Value::Object(e)) = (&mut payload, extra) {
        p.extend(e);
    }
    Outcome::new(status, payload, render::csv(&["status", "checked", "witness"], &[row]))
}

fn nilpotency(spec: &ProblemSpec) -> Result<Outcome, CliError> {
    let charge = spec.require_charge()?;
    let r = check_nilpotent(&charge, &spec.space()?, spec.weight_max()?, spec.x0_cap()?)?;
    let mut extra = json!({});
    if let Some(c) = spec.structure_constants()? {
        let violations: Vec<Value> = c.jacobi_violations().iter().map(|(i, j, k, l)| json!([i, j, k, l])).collect();
        extra = json!({ "jacobi_violations": violations });
    }
    Ok(report(r, spec.dim, extra))
}

fn anticommute(spec: &ProblemSpec) -> Result<Outcome, CliError> {
    if spec.side != spec::SideName::Omega {
        return Err(CliError::invalid("side", "anticommute compares d_dR with the potential charge on the omega side"));
    }
    let f = spec.potential()?.ok_or_else(|| CliError::invalid("potential", "required by anticommute"))?;
    let (dr, qf) = (chiral_de_rham(spec.dim), potential_charge(&f, Side::Omega));
    let r = check_anticommute(&dr, &qf, &spec.space()?, spec.weight_max()?, spec.x0_cap()?)?;
    Ok(report(r, spec.dim, json!({})))
}

fn reconstruct(spec: &ProblemSpec) -> Result<Outcome, CliError> {
    let space = spec.space()?;
    let charge = spec.require_charge()?;
    let vector = spec.reconstruction_vector()?;
    let residue = residue_charge(&space, &vector)?;
    let (w_max, cap) = (spec.weight_max()?, spec.x0_cap()?);
    let direct = instantiate_charge(&charge, &space, w_max)?;
    let mut checked = 0usize;
    for w in 0..=w_max {
        for m in enumerate_basis(&space, w, &BasisQuery::new().x0_cap(cap))? {
            let v = State::from_monomial(m.clone());
            let (a, b) = (residue.apply(&v), direct.apply(&v));
            if a != b {
                let payload = json!({
                    "vector": render::state(&vector, spec.dim),
                    "witness": render::monomial(&m, spec.dim),
                    "residue_image": render::state(&a, spec.dim),
                    "charge_image": render::state(&b, spec.dim),
                });
                let csv = render::csv(&["status", "checked", "witness"], &[vec!["fail".into(), checked.to_string(), m.to_text(spec.dim)]]);
                return Ok(Outcome::new(Status::Fail, payload, csv));
            }
            checked += 1;
        }
    }
    let payload = json!({ "vector": render::state(&vector, spec.dim), "checked": checked });
    let csv = render::csv(&["status", "checked", "witness"], &[vec!["pass".into(), checked.to_string(), String::new()]]);
    Ok(Outcome::new(Status::Pass, payload, csv))
}

fn module(spec: &ProblemSpec) -> Result<(TruncatedModule, Vec<String>), CliError> {
    if spec.dim != 1 || spec.side != spec::SideName::Theta {
        return Err(CliError::invalid("dim", "zero-mode modules are implemented for the theta side of the line"));
    }
    let (w, cap) = (spec.weight_max()?, spec.x0_cap()?);
    let name = spec.options.module.as_deref().unwrap_or("vacuum");
    let base = match name {
        "vacuum" => return Ok((TruncatedModule::vacuum(cap, w), vec!["vac".into()])),
        "delta" => ZeroModeModule::delta(cap)?,
        "polynomial" => ZeroModeModule::polynomial(cap)?,
        other => return Err(CliError::invalid("options.module", format!("unknown module `{other}`"))),
    };
    let labels = base.basis().iter().map(|b| b.label.clone()).collect();
    Ok((induce(&base, w), labels))
}

fn singular(spec: &ProblemSpec) -> Result<Outcome, CliError> {
    let (m, labels) = module(spec)?;
    let label = |b: usize| labels.get(b).cloned().unwrap_or_else(|| b.to_string());
    let mut weights = Vec::new();
    let mut rows = Vec::new();
    for q in 0..=m.weight_cap() {
        let vectors = singular_vectors(&m, q)?;
        rows.push(vec![q.to_string(), vectors.len().to_string()]);
        let listed: Vec<Value> = vectors.iter().map(|v| render::module_vector(v, &label)).collect();
        weights.push(json!({ "weight": q, "dim": vectors.len(), "vectors": listed }));
    }
    let csv = render::csv(&["weight", "singular_dim"], &rows);
    Ok(Outcome::new(Status::Done, json!({ "weights": weights }), csv))
}

fn epsilon(spec: &ProblemSpec) -> Result<Outcome, CliError> {
    let (m, _) = module(spec)?;
    let r = check_epsilon(&m)?;
    let per_weight: Vec<Value> = r
        .per_weight
        .iter()
        .enumerate()
        .map(|(q, (src, dst, rank))| json!({ "weight": q, "induced_dim": src, "module_dim": dst, "rank": rank }))
        .collect();
    let rows: Vec<Vec<String>> = r
        .per_weight
        .iter()
        .enumerate()
        .map(|(q, (a, b, k))| vec![q.to_string(), r.singular_dims[q].to_string(), a.to_string(), b.to_string(), k.to_string()])
        .collect();
    let status = if r.passed() { Status::Pass } else { Status::Fail };
    let payload = json!({ "singular_dims": r.singular_dims, "per_weight": per_weight, "bijective": r.passed() });
    let csv = render::csv(&["weight", "singular_dim", "induced_dim", "module_dim", "rank"], &rows);
    Ok(Outcome::new(status, payload, csv))
}
