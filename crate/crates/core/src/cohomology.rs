//! Exact cohomology of a charge per conformal weight.
//!
//! Weight-0 pieces are infinite (ℂ[x₀] sits there), so every computation runs
//! inside a torus truncation. A charge whose patterns all have torus weight 0
//! splits into finite pieces of fixed torus weight, which are summed up to the
//! cap. A charge whose patterns all have torus weight ≤ 0 preserves the
//! subspace of torus weight ≤ cap, which is used as a subcomplex. Each result
//! carries a flag saying whether raising the cap by one changes it.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::charges::torus_profile;
use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, enumerate_torus_range, BasisQuery, Monomial, SpaceSpec, TorusWeights};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::oper::{instantiate_charge, InstantiatedCharge, SymbolicCharge};
use crate::qseries::{Row, TruncatedSeries};

/// How a charge interacts with the torus grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ChargeKind {
    /// Every pattern has torus weight 0.
    Homogeneous,
    /// Every pattern has torus weight ≤ 0, some < 0.
    Filtered,
}

/// Classifies the charge against the weights; positive pattern weights are
/// rejected because no torus-bounded subspace would be preserved.
pub fn classify(charge: &SymbolicCharge, weights: &TorusWeights) -> Result<ChargeKind> {
    let profile = torus_profile(charge, weights)?;
    match profile.iter().next_back() {
        Some(&t) if t > 0 => Err(Error::NotFiltered(t)),
        _ if profile.iter().all(|&t| t == 0) => Ok(ChargeKind::Homogeneous),
        _ => Ok(ChargeKind::Filtered),
    }
}

/// Torus weights together with the largest torus weight kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truncation {
    weights: TorusWeights,
    torus_cap: i64,
}

impl Truncation {
    /// All x-weights must be positive so every truncated piece is finite.
    pub fn new(weights: TorusWeights, torus_cap: i64) -> Result<Self> {
        if let Some(w) = weights.x().iter().find(|&&w| w <= 0) {
            return Err(Error::InvalidTorusWeights(format!("x-weights must be positive to regularize, found {w}")));
        }
        Ok(Truncation { weights, torus_cap })
    }

    /// The cap reaching `x₀^cap` in the lightest direction.
    pub fn from_x0_cap(weights: TorusWeights, cap: u32) -> Result<Self> {
        let min = weights.x().iter().copied().min().unwrap_or(1);
        Self::new(weights, cap as i64 * min)
    }

    pub fn weights(&self) -> &TorusWeights {
        &self.weights
    }

    pub fn torus_cap(&self) -> i64 {
        self.torus_cap
    }

    pub fn with_cap(&self, torus_cap: i64) -> Self {
        Truncation { weights: self.weights.clone(), torus_cap }
    }
}

/// The matrix of a charge between two ordered bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixBlock {
    pub domain: Vec<Monomial>,
    pub codomain: Vec<Monomial>,
    pub matrix: SparseMatrix,
}

/// Entry `(r, c)` is the coefficient of `codomain[r]` in `Q(domain[c])`.
/// With `strict`, an image term outside the codomain is an error; otherwise
/// it is projected away.
fn block(q: &InstantiatedCharge, domain: &[Monomial], codomain: &[Monomial], strict: bool) -> Result<MatrixBlock> {
    let index: HashMap<&Monomial, usize> = codomain.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let dim = q.space().dim();
    let columns = domain
        .par_iter()
        .map(|m| {
            let mut col = SparseVec::new();
            for (img, c) in q.apply_monomial(m).terms() {
                match index.get(img) {
                    Some(&r) => {
                        col.insert(r, c.clone());
                    }
                    None if strict => {
                        return Err(Error::NotClosed(format!("{} (term {})", m.to_text(dim), img.to_text(dim))));
                    }
                    None => {}
                }
            }
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MatrixBlock {
        domain: domain.to_vec(),
        codomain: codomain.to_vec(),
        matrix: SparseMatrix::from_columns(codomain.len(), columns),
    })
}

/// The charge from the degree-`degree` piece at `weight` (further constrained
/// by `query`) to the piece of degree `degree + step` (step = the charge's
/// degree, normally +1), projected onto the target basis.
pub fn boundary_matrix(
    charge: &SymbolicCharge,
    space: &SpaceSpec,
    weight: u32,
    degree: i64,
    query: &BasisQuery,
) -> Result<MatrixBlock> {
    let step = charge_step(charge)?;
    let q = instantiate_charge(charge, space, weight)?;
    let domain = enumerate_basis(space, weight, &query.clone().degree(degree))?;
    let codomain = enumerate_basis(space, weight, &query.clone().degree(degree + step))?;
    block(&q, &domain, &codomain, false)
}

/// Chain and cohomology dimensions of one finite complex, by degree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComplexDims {
    pub chains: BTreeMap<i64, usize>,
    pub cohomology: BTreeMap<i64, usize>,
}

impl ComplexDims {
    pub fn chain_euler(&self) -> i64 {
        alternating(&self.chains)
    }

    pub fn euler(&self) -> i64 {
        alternating(&self.cohomology)
    }

    fn absorb(&mut self, other: &ComplexDims) {
        for (k, v) in &other.chains {
            *self.chains.entry(*k).or_default() += v;
        }
        for (k, v) in &other.cohomology {
            *self.cohomology.entry(*k).or_default() += v;
        }
    }

    fn nonzero(&self) -> BTreeMap<i64, usize> {
        self.cohomology.iter().filter(|(_, &v)| v > 0).map(|(k, v)| (*k, *v)).collect()
    }
}

fn alternating(m: &BTreeMap<i64, usize>) -> i64 {
    m.iter().map(|(k, &v)| if k.rem_euclid(2) == 0 { v as i64 } else { -(v as i64) }).sum()
}

/// The degree step of a differential: the common degree of its patterns,
/// which must be ±1 (the zero charge counts as +1).
pub fn charge_step(charge: &SymbolicCharge) -> Result<i64> {
    match charge.degree()? {
        None => Ok(1),
        Some(d) if d == 1 || d == -1 => Ok(d),
        Some(d) => Err(Error::BrstContract(format!("charge has cohomological degree {d}, need +1 or -1"))),
    }
}

/// Cohomology of the complex spanned by `groups` (degree → basis), which must
/// be closed under the charge; the charge maps degree `k` to `k + step`.
fn complex_dims(q: &InstantiatedCharge, step: i64, groups: &BTreeMap<i64, Vec<Monomial>>) -> Result<ComplexDims> {
    let empty = Vec::new();
    let degrees: Vec<i64> = groups.keys().copied().collect();
    let blocks = degrees
        .iter()
        .map(|&k| block(q, &groups[&k], groups.get(&(k + step)).unwrap_or(&empty), true))
        .collect::<Result<Vec<_>>>()?;
    let by_degree: BTreeMap<i64, &MatrixBlock> = degrees.iter().copied().zip(blocks.iter()).collect();
    for (&k, b) in &by_degree {
        if let Some(next) = by_degree.get(&(k + step)) {
            let sq = next.matrix.mul(&b.matrix);
            if let Some(c) = (0..sq.cols()).find(|&c| !sq.column(c).is_empty()) {
                return Err(Error::NotNilpotent { witness: b.domain[c].to_text(q.space().dim()) });
            }
        }
    }
    let ranks: BTreeMap<i64, usize> = by_degree.par_iter().map(|(&k, b)| (k, b.matrix.rank())).collect::<Vec<_>>().into_iter().collect();
    let mut out = ComplexDims::default();
    for (&k, basis) in groups {
        let incoming = ranks.get(&(k - step)).copied().unwrap_or(0);
        let dim = basis.len();
        out.chains.insert(k, dim);
        out.cohomology.insert(k, dim - ranks[&k] - incoming);
    }
    Ok(out)
}

/// Cohomology at one conformal weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightCohomology {
    pub weight: u32,
    pub total: ComplexDims,
    /// Per torus weight; only for homogeneous charges.
    pub pieces: BTreeMap<i64, ComplexDims>,
    /// Whether the result is unchanged when the torus cap grows by one.
    pub stable: bool,
}

/// Cohomology dimensions for weights `0..=max_weight`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyTable {
    pub kind: ChargeKind,
    /// Degree change of the differential, +1 or −1.
    pub step: i64,
    pub truncation: Truncation,
    pub weights: Vec<WeightCohomology>,
    pub notes: Vec<String>,
}

impl CohomologyTable {
    pub fn dim(&self, weight: u32, degree: i64) -> usize {
        self.weights
            .get(weight as usize)
            .and_then(|w| w.total.cohomology.get(&degree).copied())
            .unwrap_or(0)
    }

    pub fn stabilized(&self) -> bool {
        self.weights.iter().all(|w| w.stable)
    }

    /// `Σ(−1)^k dim Hᵏ = Σ(−1)^k dim Cᵏ` at every weight and piece.
    pub fn euler_poincare_holds(&self) -> bool {
        self.weights.iter().all(|w| {
            w.total.euler() == w.total.chain_euler() && w.pieces.values().all(|p| p.euler() == p.chain_euler())
        })
    }
}

fn group_by_degree<'a>(it: impl Iterator<Item = (i64, &'a Vec<Monomial>)>) -> BTreeMap<i64, Vec<Monomial>> {
    let mut out: BTreeMap<i64, Vec<Monomial>> = BTreeMap::new();
    for (deg, basis) in it {
        out.entry(deg).or_default().extend(basis.iter().cloned());
    }
    for v in out.values_mut() {
        v.sort();
    }
    out
}

fn weight_cohomology(
    q: &InstantiatedCharge,
    space: &SpaceSpec,
    j: u32,
    kind: ChargeKind,
    step: i64,
    trunc: &Truncation,
) -> Result<WeightCohomology> {
    let cap = trunc.torus_cap;
    let groups = enumerate_torus_range(space, j, &trunc.weights, cap + 1)?;
    match kind {
        ChargeKind::Homogeneous => {
            let mut torus: Vec<i64> = groups.keys().map(|&(t, _)| t).collect();
            torus.dedup();
            let pieces = torus
                .par_iter()
                .map(|&t| {
                    let g = group_by_degree(groups.range((t, i64::MIN)..=(t, i64::MAX)).map(|(&(_, k), b)| (k, b)));
                    complex_dims(q, step, &g).map(|d| (t, d))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut total = ComplexDims::default();
            let mut stable = true;
            let mut kept = BTreeMap::new();
            for (t, d) in pieces {
                if t <= cap {
                    total.absorb(&d);
                    kept.insert(t, d);
                } else if !d.nonzero().is_empty() {
                    stable = false;
                }
            }
            Ok(WeightCohomology { weight: j, total, pieces: kept, stable })
        }
        ChargeKind::Filtered => {
            let at = |c: i64| {
                let g = group_by_degree(groups.iter().filter(|((t, _), _)| *t <= c).map(|(&(_, k), b)| (k, b)));
                complex_dims(q, step, &g)
            };
            let (total, bigger) = rayon::join(|| at(cap), || at(cap + 1));
            let total = total?;
            let stable = total.nonzero() == bigger?.nonzero();
            Ok(WeightCohomology { weight: j, total, pieces: BTreeMap::new(), stable })
        }
    }
}

/// Cohomology dimensions at every weight `0..=max_weight` inside the
/// truncation. Fails if the charge does not square to zero on a computed block
/// or leaves the truncated complex.
pub fn cohomology_dims(
    charge: &SymbolicCharge,
    space: &SpaceSpec,
    max_weight: u32,
    trunc: &Truncation,
) -> Result<CohomologyTable> {
    if charge.side.is_some_and(|s| s != space.side()) {
        return Err(Error::SideMismatch { expected: charge.side.unwrap(), found: space.side() });
    }
    let kind = classify(charge, &trunc.weights)?;
    let step = charge_step(charge)?;
    let q = instantiate_charge(charge, space, max_weight)?;
    let weights = (0..=max_weight)
        .into_par_iter()
        .map(|j| weight_cohomology(&q, space, j, kind, step, trunc))
        .collect::<Result<Vec<_>>>()?;
    let mut notes = vec!["affine space: hypercohomology computed as cohomology of global sections".to_string()];
    notes.push(match kind {
        ChargeKind::Homogeneous => format!("torus-homogeneous charge: pieces of torus weight <= {} summed", trunc.torus_cap),
        ChargeKind::Filtered => format!("torus-filtered charge: subcomplex of torus weight <= {}", trunc.torus_cap),
    });
    if step < 0 {
        notes.push("charge lowers the degree #phi - #psi by one; complex runs downward".to_string());
    }
    Ok(CohomologyTable { kind, step, truncation: trunc.clone(), weights, notes })
}

/// Bigraded Euler characteristic `Σ (−1)^deg q^weight z^torus` of the bare
/// graded space, for weights `≤ max_weight` and torus weights in `z_window`.
pub fn euler_series(
    space: &SpaceSpec,
    max_weight: u32,
    z_window: (i64, i64),
    weights: &TorusWeights,
) -> Result<TruncatedSeries> {
    let (zmin, zmax) = z_window;
    let rows = (0..=max_weight)
        .into_par_iter()
        .map(|j| {
            let groups = enumerate_torus_range(space, j, weights, zmax)?;
            let mut coeffs: BTreeMap<i64, BigInt> = BTreeMap::new();
            for ((t, deg), basis) in groups {
                if t >= zmin {
                    let sign = if deg.rem_euclid(2) == 0 { 1 } else { -1 };
                    *coeffs.entry(t).or_default() += BigInt::from(sign * basis.len() as i64);
                }
            }
            Ok(Row::new(zmin, zmax, i64::MIN, i64::MAX, coeffs))
        })
        .collect::<Result<Vec<_>>>()?;
    TruncatedSeries::from_rows(rows)
}

/// The refined character `Σ_j χ(H^{(j)}) q^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiVan {
    /// Refined by torus weight for homogeneous charges (exact for `z` up to the
    /// cap); only the `z⁰` total for filtered ones.
    pub series: TruncatedSeries,
    pub table: CohomologyTable,
}

impl ChiVan {
    pub fn stabilized(&self) -> bool {
        self.table.stabilized()
    }

    /// `χ` at weight `j`, summed over torus weights.
    pub fn total(&self, j: u32) -> i64 {
        self.table.weights[j as usize].total.euler()
    }
}

pub fn chi_van(charge: &SymbolicCharge, space: &SpaceSpec, max_weight: u32, trunc: &Truncation) -> Result<ChiVan> {
    let table = cohomology_dims(charge, space, max_weight, trunc)?;
    let rows = table
        .weights
        .iter()
        .map(|w| match table.kind {
            ChargeKind::Homogeneous => {
                let coeffs = w.pieces.iter().map(|(t, d)| (*t, BigInt::from(d.euler()))).collect();
                Row::new(i64::MIN, trunc.torus_cap, i64::MIN, i64::MAX, coeffs)
            }
            ChargeKind::Filtered => Row::exact(BTreeMap::from([(0, BigInt::from(w.total.euler()))])),
        })
        .collect();
    Ok(ChiVan { series: TruncatedSeries::from_rows(rows)?, table })
}
