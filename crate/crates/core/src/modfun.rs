//! Zero-mode data on the affine line, induction to positive modes, and the
//! singular-vector functor, all at finite truncation.
//!
//! A zero-mode module is a finite basis with dense action matrices for
//! `x₀, y₀, φ₀, ψ₀`. Polynomial-type modules are infinite, so the basis carries
//! an internal degree and a cap. The relations are only required on vectors
//! of degree below the cap, whose images are not cut off.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fock::{coeff, enumerate_basis, make_space, BasisQuery, Coeff, Family, ModeKey, Monomial, Side, SpaceSpec, State};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::oper::{act_mode, apply_mode, instantiate_charge, SymbolicCharge};

/// Square matrix, `m[r][c]` = coefficient of basis vector `r` in the image of `c`.
pub type Dense = Vec<Vec<Coeff>>;

/// One basis vector of a zero-mode module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseVector {
    pub label: String,
    pub odd: bool,
    /// Internal polynomial degree, compared against the cap.
    pub degree: u32,
}

/// A finite zero-mode module on the affine line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroModeModule {
    basis: Vec<BaseVector>,
    cap: u32,
    x0: Dense,
    y0: Dense,
    phi0: Dense,
    psi0: Dense,
}

fn dense_zero(n: usize) -> Dense {
    vec![vec![Coeff::zero(); n]; n]
}

fn dense_apply(m: &Dense, v: &[Coeff]) -> Vec<Coeff> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).fold(Coeff::zero(), |s, x| s + x)).collect()
}

fn unit(n: usize, i: usize) -> Vec<Coeff> {
    let mut v = vec![Coeff::zero(); n];
    v[i] = Coeff::one();
    v
}

impl ZeroModeModule {
    /// Validates shapes, parity and the relations `[y₀, x₀] = 1`,
    /// `[ψ₀, φ₀]₊ = 1` (all other pairs supercommuting) on every basis vector
    /// of degree below `cap`.
    pub fn new(basis: Vec<BaseVector>, cap: u32, x0: Dense, y0: Dense, phi0: Dense, psi0: Dense) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::ZeroModeModule("empty basis".into()));
        }
        if cap == 0 {
            return Err(Error::ZeroModeModule("cap must be at least 1 to express any action".into()));
        }
        let m = ZeroModeModule { basis, cap, x0, y0, phi0, psi0 };
        for (name, mat, odd) in m.operators() {
            if mat.len() != n || mat.iter().any(|r| r.len() != n) {
                return Err(Error::ZeroModeModule(format!("{name} must be {n}x{n}")));
            }
            for c in 0..n {
                for r in 0..n {
                    if !mat[r][c].is_zero() && (m.basis[r].odd != (m.basis[c].odd ^ odd)) {
                        return Err(Error::ZeroModeModule(format!(
                            "{name} maps {} to {} with the wrong parity",
                            m.basis[c].label, m.basis[r].label
                        )));
                    }
                }
            }
        }
        m.check_relations()?;
        Ok(m)
    }

    fn operators(&self) -> [(&'static str, &Dense, bool); 4] {
        [("x0", &self.x0, false), ("y0", &self.y0, false), ("phi0", &self.phi0, true), ("psi0", &self.psi0, true)]
    }

    fn check_relations(&self) -> Result<()> {
        let n = self.basis.len();
        let ops = self.operators();
        for c in (0..n).filter(|&c| self.basis[c].degree < self.cap) {
            let v = unit(n, c);
            for (i, (na, a, oa)) in ops.iter().enumerate() {
                for (nb, b, ob) in ops.iter().skip(i) {
                    let ab = dense_apply(a, &dense_apply(b, &v));
                    let ba = dense_apply(b, &dense_apply(a, &v));
                    let anti = *oa && *ob;
                    let comm: Vec<Coeff> = ab.iter().zip(&ba).map(|(x, y)| if anti { x + y } else { x - y }).collect();
                    let expected = match (*na, *nb) {
                        ("x0", "y0") => v.iter().map(|x| -x).collect(),
                        ("phi0", "psi0") => v.clone(),
                        _ => vec![Coeff::zero(); n],
                    };
                    if comm != expected {
                        return Err(Error::ZeroModeModule(format!(
                            "relation [{na}, {nb}] fails on basis vector {}",
                            self.basis[c].label
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `ℂ[x₀] ⊗ Λ[ψ₀]` with `x₀`-degree ≤ `cap`: the zero-mode part of the
    /// vacuum module.
    pub fn polynomial(cap: u32) -> Result<Self> {
        let idx = |k: u32, e: u32| (2 * k + e) as usize;
        let n = 2 * (cap as usize + 1);
        let mut basis = Vec::with_capacity(n);
        let (mut x0, mut y0, mut phi0, mut psi0) = (dense_zero(n), dense_zero(n), dense_zero(n), dense_zero(n));
        for k in 0..=cap {
            for e in 0..=1 {
                let label = match (k, e) {
                    (0, 0) => "1".to_string(),
                    (0, 1) => "psi_0".to_string(),
                    (k, 0) => format!("x_0^{k}"),
                    (k, _) => format!("x_0^{k} psi_0"),
                };
                basis.push(BaseVector { label, odd: e == 1, degree: k });
                let c = idx(k, e);
                if k < cap {
                    x0[idx(k + 1, e)][c] = Coeff::one();
                }
                if k > 0 {
                    y0[idx(k - 1, e)][c] = coeff(k as i64);
                }
                if e == 0 {
                    psi0[idx(k, 1)][c] = Coeff::one();
                } else {
                    phi0[idx(k, 0)][c] = Coeff::one();
                }
            }
        }
        Self::new(basis, cap, x0, y0, phi0, psi0)
    }

    /// `ℂ[y₀]δ ⊗ Λ[ψ₀]` with `x₀δ = 0`, i.e. `x₀ = −∂/∂y₀`, and `y₀`-degree
    /// ≤ `cap`.
    pub fn delta(cap: u32) -> Result<Self> {
        let idx = |k: u32, e: u32| (2 * k + e) as usize;
        let n = 2 * (cap as usize + 1);
        let mut basis = Vec::with_capacity(n);
        let (mut x0, mut y0, mut phi0, mut psi0) = (dense_zero(n), dense_zero(n), dense_zero(n), dense_zero(n));
        for k in 0..=cap {
            for e in 0..=1 {
                let y = if k == 0 { String::new() } else { format!("y_0^{k} ") };
                let label = if e == 0 { format!("{y}delta") } else { format!("{y}delta psi_0") };
                basis.push(BaseVector { label, odd: e == 1, degree: k });
                let c = idx(k, e);
                if k < cap {
                    y0[idx(k + 1, e)][c] = Coeff::one();
                }
                if k > 0 {
                    x0[idx(k - 1, e)][c] = coeff(-(k as i64));
                }
                if e == 0 {
                    psi0[idx(k, 1)][c] = Coeff::one();
                } else {
                    phi0[idx(k, 0)][c] = Coeff::one();
                }
            }
        }
        Self::new(basis, cap, x0, y0, phi0, psi0)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn basis(&self) -> &[BaseVector] {
        &self.basis
    }

    fn matrix(&self, family: Family) -> &Dense {
        match family {
            Family::X => &self.x0,
            Family::Y => &self.y0,
            Family::Phi => &self.phi0,
            Family::Psi => &self.psi0,
        }
    }
}

/// An element of a truncated module: a positive-mode monomial over a base
/// vector index (always 0 for the vacuum module).
pub type Elem = (Monomial, usize);
pub type Vector = BTreeMap<Elem, Coeff>;

fn add_to(v: &mut Vector, e: Elem, c: Coeff) {
    let entry = v.entry(e.clone()).or_insert_with(Coeff::zero);
    *entry += c;
    if entry.is_zero() {
        v.remove(&e);
    }
}

/// A module truncated at conformal weight `weight_cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TruncatedModule {
    /// The vacuum module of Θ on the line, with an `x₀`-degree cap.
    Vacuum { x0_cap: u32, weight_cap: u32 },
    /// `N[x_i, y_i, φ_i, ψ_i]_{i>0}` up to weight `weight_cap`.
    Induced { base: ZeroModeModule, weight_cap: u32 },
}

fn theta_line() -> SpaceSpec {
    make_space(Side::Theta, 1).expect("dimension 1 is valid")
}

/// `ι(N)` truncated at weight `w`.
pub fn induce(base: &ZeroModeModule, w: u32) -> TruncatedModule {
    TruncatedModule::Induced { base: base.clone(), weight_cap: w }
}

impl TruncatedModule {
    pub fn vacuum(x0_cap: u32, weight_cap: u32) -> Self {
        TruncatedModule::Vacuum { x0_cap, weight_cap }
    }

    pub fn weight_cap(&self) -> u32 {
        match self {
            TruncatedModule::Vacuum { weight_cap, .. } | TruncatedModule::Induced { weight_cap, .. } => *weight_cap,
        }
    }

    /// Basis at conformal weight `q`.
    pub fn basis(&self, q: u32) -> Result<Vec<Elem>> {
        let space = theta_line();
        match self {
            TruncatedModule::Vacuum { x0_cap, .. } => {
                Ok(enumerate_basis(&space, q, &BasisQuery::new().x0_cap(*x0_cap))?.into_iter().map(|m| (m, 0)).collect())
            }
            TruncatedModule::Induced { base, .. } => {
                let positive = enumerate_basis(&space, q, &BasisQuery::new().x0_cap(0).without_zero_fermions())?;
                Ok(positive.into_iter().flat_map(|p| (0..base.dim()).map(move |i| (p.clone(), i))).collect())
            }
        }
    }

    /// A single mode applied to a basis element.
    pub fn act(&self, mode: ModeKey, e: &Elem) -> Vector {
        let space = theta_line();
        let (p, i) = e;
        let mut out = Vector::new();
        match self {
            TruncatedModule::Vacuum { .. } => {
                if let Some((f, m)) = act_mode(&space, mode, p) {
                    out.insert((m, 0), coeff(f));
                }
            }
            TruncatedModule::Induced { base, .. } => {
                if mode.index == 0 {
                    let sign = if mode.is_fermion() && p.is_odd() { -1 } else { 1 };
                    let mat = base.matrix(mode.family);
                    for (r, row) in mat.iter().enumerate() {
                        if !row[*i].is_zero() {
                            out.insert((p.clone(), r), &row[*i] * coeff(sign));
                        }
                    }
                } else if let Some((f, m)) = act_mode(&space, mode, p) {
                    out.insert((m, *i), coeff(f));
                }
            }
        }
        out
    }

    pub fn act_vector(&self, mode: ModeKey, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (e, c) in v {
            for (e2, c2) in self.act(mode, e) {
                add_to(&mut out, e2, c2 * c);
            }
        }
        out
    }
}

fn negative_modes(q: u32) -> Vec<ModeKey> {
    let mut out = Vec::new();
    for m in 1..=q as i32 {
        for family in Family::ALL {
            out.push(ModeKey::new(family, 1, -m));
        }
    }
    out
}

/// Basis of `{m : u_{-i} m = 0 for all u and all i > 0}` at weight `q`. Modes
/// below `−q` kill weight `q` for grading reasons, so only `1..=q` are used.
pub fn singular_vectors(module: &TruncatedModule, q: u32) -> Result<Vec<Vector>> {
    if q > module.weight_cap() {
        return Err(Error::HeadRoom { requested: q, available: module.weight_cap() });
    }
    let domain = module.basis(q)?;
    let modes = negative_modes(q);
    // Stack the negative-mode matrices; rows are (mode, target element).
    let mut row_index: BTreeMap<(usize, Elem), usize> = BTreeMap::new();
    let mut columns = Vec::with_capacity(domain.len());
    for e in &domain {
        let mut col = SparseVec::new();
        for (k, mode) in modes.iter().enumerate() {
            for (target, c) in module.act(*mode, e) {
                let n = row_index.len();
                let r = *row_index.entry((k, target)).or_insert(n);
                col.insert(r, c);
            }
        }
        columns.push(col);
    }
    let stacked = SparseMatrix::from_columns(row_index.len(), columns);
    Ok(stacked
        .kernel()
        .into_iter()
        .map(|k| k.into_iter().map(|(c, x)| (domain[c].clone(), x)).collect())
        .collect())
}

/// Outcome of the ε check at each weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonReport {
    /// Dimension of the singular vectors per weight.
    pub singular_dims: Vec<usize>,
    /// Per weight: (dim ι(M^!), dim M, rank of ε).
    pub per_weight: Vec<(usize, usize, usize)>,
}

impl EpsilonReport {
    pub fn passed(&self) -> bool {
        self.per_weight.iter().all(|&(a, b, r)| a == b && b == r)
    }
}

/// Applies a positive-mode monomial (as a product of creators) to a vector.
fn apply_positive(module: &TruncatedModule, p: &Monomial, v: &Vector) -> Vector {
    let mut out = v.clone();
    for mode in p.modes().iter().rev() {
        out = module.act_vector(*mode, &out);
    }
    out
}

/// Builds `M^!` from the singular vectors of `M` (weights `0..=W`), induces it
/// and checks that `ε : ι(M^!) → M` is bijective in every weight `≤ W`.
pub fn check_epsilon(module: &TruncatedModule) -> Result<EpsilonReport> {
    let w = module.weight_cap();
    let singular: Vec<Vec<Vector>> = (0..=w).map(|q| singular_vectors(module, q)).collect::<Result<_>>()?;
    let space = theta_line();
    let mut per_weight = Vec::new();
    for q in 0..=w {
        let target = module.basis(q)?;
        let index: BTreeMap<&Elem, usize> = target.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut columns = Vec::new();
        for (qs, sv) in singular.iter().enumerate().take(q as usize + 1) {
            let positive = enumerate_basis(&space, q - qs as u32, &BasisQuery::new().x0_cap(0).without_zero_fermions())?;
            for p in &positive {
                for s in sv {
                    let img = apply_positive(module, p, s);
                    let mut col = SparseVec::new();
                    for (e, c) in img {
                        let r = *index.get(&e).ok_or_else(|| Error::ZeroModeModule("image outside the truncation".into()))?;
                        col.insert(r, c);
                    }
                    columns.push(col);
                }
            }
        }
        let eps = SparseMatrix::from_columns(target.len(), columns);
        per_weight.push((eps.cols(), target.len(), eps.rank()));
    }
    Ok(EpsilonReport { singular_dims: singular.iter().map(|s| s.len()).collect(), per_weight })
}

/// Whether the charge maps the singular vectors of the vacuum module at weight
/// `q` to vectors that are again singular.
pub fn singular_stable_under(charge: &SymbolicCharge, x0_cap: u32, q: u32) -> Result<bool> {
    let module = TruncatedModule::vacuum(x0_cap, q);
    let space = theta_line();
    let inst = instantiate_charge(charge, &space, q)?;
    for s in singular_vectors(&module, q)? {
        let state: State = s.iter().map(|((m, _), c)| (m.clone(), c.clone())).collect();
        let image = inst.apply(&state);
        for mode in negative_modes(q) {
            if !apply_mode(&space, mode, &image)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
