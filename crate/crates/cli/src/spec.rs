//! Problem specification: parsing, validation and construction of the
//! engine objects it describes.

use std::str::FromStr;

use chiral_lg::{
    chiral_de_rham, lie_charge, make_space, potential_charge, Coeff, ModeKey, Monomial, Potential, Side, SpaceSpec,
    State, StructureConstants, SymbolicCharge, TorusWeights, Truncation,
};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// An exact number: a JSON integer or a decimal string `"p"` / `"p/q"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exact {
    Int(i64),
    Text(String),
}

impl Exact {
    pub fn to_coeff(&self, field: &str) -> Result<Coeff, CliError> {
        match self {
            Exact::Int(n) => Ok(Coeff::from_integer((*n).into())),
            Exact::Text(s) => Coeff::from_str(s.trim())
                .map_err(|_| CliError::invalid(field, format!("`{s}` is not an exact integer or fraction p/q"))),
        }
    }

    fn to_index(&self, field: &str) -> Result<usize, CliError> {
        let c = self.to_coeff(field)?;
        if !c.is_integer() || c <= Coeff::zero() {
            return Err(CliError::invalid(field, format!("index `{c}` must be a positive integer")));
        }
        usize::try_from(c.to_integer()).map_err(|_| CliError::invalid(field, "index out of range"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideName {
    Theta,
    Omega,
}

impl From<SideName> for Side {
    fn from(s: SideName) -> Side {
        match s {
            SideName::Theta => Side::Theta,
            SideName::Omega => Side::Omega,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: Exact,
    pub exps: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub terms: Vec<TermSpec>,
}

/// Structure constants: entries `[k, i, j, c^k_ij]` (1-based; antisymmetric
/// partners are filled in), or a named preset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieSpec {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusSpec {
    pub x: Vec<i64>,
    pub phi: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0_cap: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_window: Option<(i64, i64)>,
}

/// Command-specific options.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Add the chiral de Rham differential to the charge.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub de_rham: bool,
    /// Explicit torus cap, overriding the one derived from `x0_cap`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus_cap: Option<i64>,
    /// `reconstruct-check`: the vector whose residue is compared, as
    /// `[coefficient, "monomial"]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<(Exact, String)>>,
    /// `singular` / `epsilon-check`: `vacuum`, `delta` or `polynomial`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub dim: usize,
    pub side: SideName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie: Option<LieSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus_weights: Option<TorusSpec>,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub options: Options,
}

impl ProblemSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: ProblemSpec = serde_json::from_str(text).map_err(|e| CliError::invalid("spec", e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.dim == 0 {
            return Err(CliError::invalid("dim", "must be at least 1"));
        }
        if self.potential.is_some() && self.lie.is_some() {
            return Err(CliError::invalid("potential", "give exactly one of `potential` and `lie`"));
        }
        if let Some(lie) = &self.lie {
            if lie.dim != self.dim {
                return Err(CliError::invalid("lie.dim", format!("must equal dim = {}", self.dim)));
            }
            if self.side != SideName::Theta {
                return Err(CliError::invalid("side", "the Lie-algebra charge lives on the theta side"));
            }
        }
        if self.options.de_rham && self.side != SideName::Omega {
            return Err(CliError::invalid("options.de_rham", "the de Rham differential lives on the omega side"));
        }
        if self.caps.x0_cap == Some(0) {
            return Err(CliError::invalid("caps.x0_cap", "must be positive"));
        }
        if let Some((a, b)) = self.caps.z_window {
            if a > b {
                return Err(CliError::invalid("caps.z_window", format!("empty window [{a}, {b}]")));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Result<SpaceSpec, CliError> {
        make_space(self.side.into(), self.dim).map_err(|e| CliError::invalid("dim", e.to_string()))
    }

    pub fn weight_max(&self) -> Result<u32, CliError> {
        self.caps.weight_max.ok_or_else(|| CliError::invalid("caps.weight_max", "required by this command"))
    }

    pub fn x0_cap(&self) -> Result<u32, CliError> {
        self.caps.x0_cap.ok_or_else(|| CliError::invalid("caps.x0_cap", "required by this command"))
    }

    pub fn q_max(&self) -> Result<u32, CliError> {
        self.caps.q_max.ok_or_else(|| CliError::invalid("caps.q_max", "required by this command"))
    }

    pub fn z_window(&self) -> Result<(i64, i64), CliError> {
        self.caps.z_window.ok_or_else(|| CliError::invalid("caps.z_window", "required by this command"))
    }

    pub fn potential(&self) -> Result<Option<Potential>, CliError> {
        let Some(p) = &self.potential else { return Ok(None) };
        let mut terms = Vec::with_capacity(p.terms.len());
        for (n, t) in p.terms.iter().enumerate() {
            let field = format!("potential.terms[{n}]");
            if t.exps.len() != self.dim {
                return Err(CliError::invalid(&field, format!("needs {} exponents, found {}", self.dim, t.exps.len())));
            }
            terms.push((t.coeff.to_coeff(&format!("{field}.coeff"))?, t.exps.clone()));
        }
        Potential::new(self.dim, terms).map(Some).map_err(|e| CliError::invalid("potential", e.to_string()))
    }

    /// The structure constants, checked for antisymmetry only: a Jacobi
    /// failure is something the checks are supposed to detect.
    pub fn structure_constants(&self) -> Result<Option<StructureConstants>, CliError> {
        let Some(lie) = &self.lie else { return Ok(None) };
        if let Some(name) = &lie.preset {
            if !lie.c.is_empty() {
                return Err(CliError::invalid("lie.preset", "give either a preset or entries `c`, not both"));
            }
            let sc = match name.as_str() {
                "sl2" => StructureConstants::sl2(),
                "heisenberg" => StructureConstants::heisenberg(),
                "affine_line" => StructureConstants::affine_line(),
                "abelian" => StructureConstants::abelian(lie.dim),
                other => return Err(CliError::invalid("lie.preset", format!("unknown preset `{other}`"))),
            };
            if sc.dim() != lie.dim {
                return Err(CliError::invalid("lie.dim", format!("preset `{name}` has dimension {}", sc.dim())));
            }
            return Ok(Some(sc));
        }
        let n = lie.dim;
        let mut table = vec![vec![vec![None::<Coeff>; n + 1]; n + 1]; n + 1];
        for (pos, raw) in flatten_entries(&lie.c).into_iter().enumerate() {
            let field = format!("lie.c[{pos}]");
            let parts: Vec<Exact> = serde_json::from_value(raw.clone())
                .map_err(|_| CliError::invalid(&field, "entries are [k, i, j, value]"))?;
            let [k, i, j, v] = parts.as_slice() else {
                return Err(CliError::invalid(&field, "entries are [k, i, j, value]"));
            };
            let (k, i, j) = (k.to_index(&field)?, i.to_index(&field)?, j.to_index(&field)?);
            if k.max(i).max(j) > n {
                return Err(CliError::invalid(&field, format!("index exceeds lie.dim = {n}")));
            }
            let v = v.to_coeff(&field)?;
            for (a, b, val) in [(i, j, v.clone()), (j, i, -v.clone())] {
                match &table[k][a][b] {
                    Some(old) if *old != val => {
                        return Err(CliError::invalid(&field, format!("conflicts with antisymmetry at c^{k}_({a},{b})")))
                    }
                    _ => table[k][a][b] = Some(val),
                }
            }
        }
        let sc = StructureConstants::from_fn_unchecked(n, |k, i, j| table[k][i][j].clone().unwrap_or_else(Coeff::zero));
        Ok(Some(sc))
    }

    /// The charge: potential or Lie part, plus the de Rham differential if
    /// requested. `None` when the spec describes no charge at all.
    pub fn charge(&self) -> Result<Option<SymbolicCharge>, CliError> {
        let side: Side = self.side.into();
        let mut parts = Vec::new();
        if self.options.de_rham {
            parts.push(chiral_de_rham(self.dim));
        }
        if let Some(f) = self.potential()? {
            parts.push(potential_charge(&f, side));
        }
        if let Some(c) = self.structure_constants()? {
            parts.push(lie_charge(&c));
        }
        let mut it = parts.into_iter();
        let Some(first) = it.next() else { return Ok(None) };
        it.try_fold(first, |acc, q| acc.plus(&q))
            .map(Some)
            .map_err(|e| CliError::invalid("spec", e.to_string()))
    }

    pub fn require_charge(&self) -> Result<SymbolicCharge, CliError> {
        self.charge()?.ok_or_else(|| {
            CliError::invalid("potential", "this command needs a charge: give `potential`, `lie` or `options.de_rham`")
        })
    }

    /// Explicit weights, else the natural ones of the charge.
    pub fn torus_weights(&self) -> Result<TorusWeights, CliError> {
        if let Some(t) = &self.torus_weights {
            let built = match &t.psi {
                Some(psi) => TorusWeights::new(t.x.clone(), t.phi.clone(), psi.clone()),
                None => TorusWeights::from_x_phi(t.x.clone(), t.phi.clone()),
            };
            return built.map_err(|e| CliError::invalid("torus_weights", e.to_string()));
        }
        if let Some(f) = self.potential()? {
            return f.torus_weights(None).map_err(|e| {
                CliError::invalid("torus_weights", format!("{e}; the potential has no default grading, give torus_weights"))
            });
        }
        if self.lie.is_some() {
            return Ok(TorusWeights::polynomial_degree(self.dim));
        }
        if self.options.de_rham {
            return Ok(TorusWeights::de_rham(self.dim));
        }
        Err(CliError::invalid("torus_weights", "required when the spec has no potential, Lie data or de Rham part"))
    }

    pub fn truncation(&self) -> Result<Truncation, CliError> {
        let weights = self.torus_weights()?;
        let built = match self.options.torus_cap {
            Some(t) => Truncation::new(weights, t),
            None => Truncation::from_x0_cap(weights, self.x0_cap()?),
        };
        built.map_err(|e| CliError::invalid("torus_weights", e.to_string()))
    }

    /// The vector for `reconstruct-check`: explicit, or the standard one for
    /// the de Rham differential (`Σ y_1 φ_0`) or a potential on the theta
    /// side (`Σ ∂_j f(x_0) φ^j_1`).
    pub fn reconstruction_vector(&self) -> Result<State, CliError> {
        if let Some(parts) = &self.options.vector {
            let mut s = State::zero();
            for (n, (c, text)) in parts.iter().enumerate() {
                let field = format!("options.vector[{n}]");
                let (neg, m) = Monomial::parse(text, self.dim).map_err(|e| CliError::invalid(&field, e.to_string()))?;
                let c = c.to_coeff(&field)?;
                s.add_term(m, if neg { -c } else { c });
            }
            return Ok(s);
        }
        let mut s = State::zero();
        if self.options.de_rham {
            for j in 1..=self.dim as u16 {
                push_modes(&mut s, Coeff::from_integer(1.into()), &[ModeKey::y(j, 1), ModeKey::phi(j, 0)]);
            }
        }
        if let Some(f) = self.potential()? {
            if self.side != SideName::Theta {
                return Err(CliError::invalid("options.vector", "give the vector explicitly for a potential on the omega side"));
            }
            for j in 1..=self.dim {
                for (c, exps) in f.partial(j) {
                    let mut modes = Vec::new();
                    for (i, &e) in exps.iter().enumerate() {
                        modes.extend(std::iter::repeat(ModeKey::x(i as u16 + 1, 0)).take(e as usize));
                    }
                    modes.push(ModeKey::phi(j as u16, 1));
                    push_modes(&mut s, c, &modes);
                }
            }
        }
        if self.lie.is_some() || (!self.options.de_rham && self.potential.is_none()) {
            return Err(CliError::invalid("options.vector", "no standard vector for this charge; give one explicitly"));
        }
        Ok(s)
    }
}

fn push_modes(s: &mut State, c: Coeff, modes: &[ModeKey]) {
    if let Some((neg, m)) = Monomial::from_modes(modes) {
        s.add_term(m, if neg { -c } else { c });
    }
}

/// Accepts `[[k,i,j,v], ...]` as well as one extra level of nesting.
fn flatten_entries(values: &[Value]) -> Vec<&Value> {
    let mut out = Vec::new();
    for v in values {
        match v {
            Value::Array(inner) if inner.iter().all(Value::is_array) && !inner.is_empty() => out.extend(inner.iter()),
            other => out.push(other),
        }
    }
    out
}
