//! The named differentials: chiral de Rham, the potential twist `df` on either
//! side, and the Lie-algebra charge. Plus the nilpotency, anticommutation and
//! torus-homogeneity checks.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{coeff, enumerate_basis, BasisQuery, Coeff, Family, Monomial, Side, SpaceSpec, State, TorusWeights};
use crate::oper::{instantiate_charge, InstantiatedCharge, Letter, Pattern, SymbolicCharge};

/// A polynomial `f = Σ c_α x^α` on affine `dim`-space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Coeff>,
}

impl Potential {
    pub fn new(dim: usize, terms: Vec<(Coeff, Vec<u32>)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut map = BTreeMap::new();
        for (c, exps) in terms {
            if exps.len() != dim {
                return Err(Error::InvalidPotential(format!(
                    "exponent vector {exps:?} has length {}, expected {dim}",
                    exps.len()
                )));
            }
            if map.contains_key(&exps) {
                return Err(Error::InvalidPotential(format!("duplicate exponent vector {exps:?}")));
            }
            if !c.is_zero() {
                map.insert(exps, c);
            }
        }
        Ok(Potential { dim, terms: map })
    }

    /// `z^n` on the affine line.
    pub fn power(n: u32) -> Self {
        Potential { dim: 1, terms: BTreeMap::from([(vec![n], Coeff::one())]) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Coeff)> {
        self.terms.iter()
    }

    /// Terms of `∂f/∂x_j` (`j` 1-based).
    pub fn partial(&self, j: usize) -> Vec<(Coeff, Vec<u32>)> {
        self.terms
            .iter()
            .filter(|(e, _)| e[j - 1] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[j - 1] -= 1;
                (c * coeff(e[j - 1] as i64), e2)
            })
            .collect()
    }

    /// Common weighted degree of all terms under `wx`, if any.
    pub fn weighted_degree(&self, wx: &[i64]) -> Option<i64> {
        let mut degs = self.terms.keys().map(|e| e.iter().zip(wx).map(|(&a, &w)| a as i64 * w).sum::<i64>());
        let d = degs.next()?;
        degs.all(|x| x == d).then_some(d)
    }

    /// Searches small positive x-weights making `f` quasi-homogeneous; the
    /// lexicographically least vector of least total weight wins.
    pub fn quasi_homogeneous_weights(&self) -> Option<Vec<i64>> {
        const MAX: i64 = 12;
        let mut best: Option<Vec<i64>> = None;
        let mut cur = vec![1i64; self.dim];
        loop {
            if self.weighted_degree(&cur).is_some_and(|d| d > 0) {
                let better = match &best {
                    None => true,
                    Some(b) => cur.iter().sum::<i64>() < b.iter().sum::<i64>(),
                };
                if better {
                    best = Some(cur.clone());
                }
            }
            let mut i = self.dim;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if cur[i] < MAX {
                    cur[i] += 1;
                    break;
                }
                cur[i] = 1;
            }
        }
    }

    /// The default grading for a quasi-homogeneous `f` of degree `D`:
    /// `wψ_j = D − wx_j`, `wφ_j = wx_j − D`.
    pub fn torus_weights(&self, wx: Option<Vec<i64>>) -> Result<TorusWeights> {
        let wx = match wx {
            Some(w) => w,
            None => self
                .quasi_homogeneous_weights()
                .ok_or_else(|| Error::InvalidTorusWeights("potential is not quasi-homogeneous".into()))?,
        };
        if wx.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: wx.len() });
        }
        let d = self
            .weighted_degree(&wx)
            .ok_or_else(|| Error::InvalidTorusWeights(format!("potential is not homogeneous for wx = {wx:?}")))?;
        let phi = wx.iter().map(|w| w - d).collect();
        TorusWeights::from_x_phi(wx, phi)
    }
}

/// Structure constants `c^k_{ij}` of a Lie algebra, `[e_i, e_j] = c^k_{ij} e_k`.
/// Indices are 1-based in the public API.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstants {
    n: usize,
    c: Vec<Coeff>,
}

impl StructureConstants {
    fn idx(n: usize, k: usize, i: usize, j: usize) -> usize {
        ((k - 1) * n + (i - 1)) * n + (j - 1)
    }

    /// From entries `(k, i, j, c^k_{ij})`. Missing antisymmetric partners are
    /// filled in; conflicting ones are rejected, as is a Jacobi failure.
    pub fn from_entries(n: usize, entries: &[(usize, usize, usize, Coeff)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut c = vec![Coeff::zero(); n * n * n];
        let mut given = vec![false; n * n * n];
        for (k, i, j, v) in entries {
            let (k, i, j) = (*k, *i, *j);
            if [k, i, j].iter().any(|&x| x == 0 || x > n) {
                return Err(Error::DimensionMismatch { expected: n, found: k.max(i).max(j) });
            }
            let a = Self::idx(n, k, i, j);
            let b = Self::idx(n, k, j, i);
            if (given[a] && c[a] != *v) || (given[b] && c[b] != -v.clone()) {
                return Err(Error::NotAntisymmetric { k, i, j });
            }
            c[a] = v.clone();
            c[b] = -v.clone();
            given[a] = true;
            given[b] = true;
        }
        let sc = StructureConstants { n, c };
        sc.validate()?;
        Ok(sc)
    }

    /// Dense constructor; checks antisymmetry and Jacobi.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> Coeff) -> Result<Self> {
        let sc = Self::from_fn_unchecked(n, f);
        sc.validate()?;
        Ok(sc)
    }

    /// Skips validation. Only for probing how the checks react to bad input.
    pub fn from_fn_unchecked(n: usize, f: impl Fn(usize, usize, usize) -> Coeff) -> Self {
        let mut c = vec![Coeff::zero(); n * n * n];
        for k in 1..=n {
            for i in 1..=n {
                for j in 1..=n {
                    c[Self::idx(n, k, i, j)] = f(k, i, j);
                }
            }
        }
        StructureConstants { n, c }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        for k in 1..=n {
            for i in 1..=n {
                for j in 1..=n {
                    if self.get(k, i, j) != -self.get(k, j, i) {
                        return Err(Error::NotAntisymmetric { k, i, j });
                    }
                }
            }
        }
        for (i, j, k, l) in self.jacobi_violations().into_iter().take(1) {
            return Err(Error::JacobiFailure { i, j, k, l });
        }
        Ok(())
    }

    /// Index tuples where `Σ_m c^m_{ij} c^l_{mk} + cyclic ≠ 0`.
    pub fn jacobi_violations(&self) -> Vec<(usize, usize, usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    for l in 1..=n {
                        let mut s = Coeff::zero();
                        for m in 1..=n {
                            s += self.get(m, i, j) * self.get(l, m, k);
                            s += self.get(m, j, k) * self.get(l, m, i);
                            s += self.get(m, k, i) * self.get(l, m, j);
                        }
                        if !s.is_zero() {
                            out.push((i, j, k, l));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> Coeff {
        self.c[Self::idx(self.n, k, i, j)].clone()
    }

    /// sl₂ in the basis (e, f, h): `[e,f] = h`, `[h,e] = 2e`, `[h,f] = −2f`.
    pub fn sl2() -> Self {
        Self::from_entries(3, &[(3, 1, 2, coeff(1)), (1, 3, 1, coeff(2)), (2, 3, 2, coeff(-2))])
            .expect("sl2 is a Lie algebra")
    }

    /// Three-dimensional Heisenberg algebra: `[e1, e2] = e3`.
    pub fn heisenberg() -> Self {
        Self::from_entries(3, &[(3, 1, 2, coeff(1))]).expect("heisenberg is a Lie algebra")
    }

    /// Two-dimensional non-abelian algebra `[e1, e2] = e2`; not unimodular.
    pub fn affine_line() -> Self {
        Self::from_entries(2, &[(2, 1, 2, coeff(1))]).expect("aff(1) is a Lie algebra")
    }

    pub fn abelian(n: usize) -> Self {
        StructureConstants { n, c: vec![Coeff::zero(); n * n * n] }
    }
}

fn pattern(c: Coeff, letters: &[(Family, usize)]) -> Pattern {
    Pattern { coeff: c, letters: letters.iter().map(|&(f, d)| Letter::new(f, d as u16)).collect() }
}

/// `Σ_i Σ_j y^j_i φ^j_{-i}` on Ω.
pub fn chiral_de_rham(dim: usize) -> SymbolicCharge {
    SymbolicCharge {
        dim,
        side: Some(Side::Omega),
        weight_shift: 0,
        patterns: (1..=dim).map(|j| pattern(Coeff::one(), &[(Family::Y, j), (Family::Phi, j)])).collect(),
    }
}

/// The twist by `df = Σ_j ∂_j f(x) φ^j`: contraction `ι_df` on Θ at weight 0,
/// `df∧` on Ω.
pub fn potential_charge(f: &Potential, side: Side) -> SymbolicCharge {
    let mut patterns = Vec::new();
    for j in 1..=f.dim() {
        for (c, exps) in f.partial(j) {
            let mut letters = Vec::new();
            for (dir, &e) in exps.iter().enumerate() {
                letters.extend(std::iter::repeat((Family::X, dir + 1)).take(e as usize));
            }
            letters.push((Family::Phi, j));
            patterns.push(pattern(c, &letters));
        }
    }
    SymbolicCharge { dim: f.dim(), side: Some(side), weight_shift: 0, patterns }
}

/// The Lie-algebra charge on Θ:
/// `c^k_{ij} x^k ψ^j y^i − ½ c^i_{jk} ψ^k ψ^j φ^i` summed over index-zero mode
/// assignments. The ψψ letters are ordered ψ^k ψ^j.
pub fn lie_charge(c: &StructureConstants) -> SymbolicCharge {
    let n = c.dim();
    let half = Coeff::new(1.into(), 2.into());
    let mut patterns = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                let v = c.get(k, i, j);
                if !v.is_zero() {
                    patterns.push(pattern(v, &[(Family::X, k), (Family::Psi, j), (Family::Y, i)]));
                }
                let w = c.get(i, j, k);
                if !w.is_zero() {
                    patterns.push(pattern(-(w * &half), &[(Family::Psi, k), (Family::Psi, j), (Family::Phi, i)]));
                }
            }
        }
    }
    SymbolicCharge { dim: n, side: Some(Side::Theta), weight_shift: 0, patterns }
}

/// Outcome of a check over a finite basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckReport {
    Pass { checked: usize },
    Fail { witness: Monomial, image: State },
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        matches!(self, CheckReport::Pass { .. })
    }
}

fn basis_upto(space: &SpaceSpec, window: u32, x0_cap: u32) -> Result<Vec<Monomial>> {
    let mut out = Vec::new();
    for w in 0..=window {
        out.extend(enumerate_basis(space, w, &BasisQuery::new().x0_cap(x0_cap))?);
    }
    Ok(out)
}

fn first_failure(basis: &[Monomial], f: impl Fn(&Monomial) -> State + Sync) -> CheckReport {
    match basis.par_iter().find_map_first(|b| {
        let img = f(b);
        (!img.is_zero()).then(|| (b.clone(), img))
    }) {
        None => CheckReport::Pass { checked: basis.len() },
        Some((witness, image)) => CheckReport::Fail { witness, image },
    }
}

/// Applies the charge twice to every basis monomial of weight ≤ `window`
/// (x₀-degree ≤ `x0_cap`) and reports the first nonzero result.
pub fn check_nilpotent(charge: &SymbolicCharge, space: &SpaceSpec, window: u32, x0_cap: u32) -> Result<CheckReport> {
    let q = instantiate_charge(charge, space, window)?;
    let basis = basis_upto(space, window, x0_cap)?;
    Ok(first_failure(&basis, |b| q.apply(&q.apply_monomial(b))))
}

fn is_odd(charge: &InstantiatedCharge) -> bool {
    charge.terms().first().map_or(true, |t| t.is_odd())
}

/// Graded commutator `Q₁Q₂ ∓ Q₂Q₁` on every basis monomial of weight ≤ `window`.
pub fn check_anticommute(
    c1: &SymbolicCharge,
    c2: &SymbolicCharge,
    space: &SpaceSpec,
    window: u32,
    x0_cap: u32,
) -> Result<CheckReport> {
    let q1 = instantiate_charge(c1, space, window)?;
    let q2 = instantiate_charge(c2, space, window)?;
    let both_odd = is_odd(&q1) && is_odd(&q2);
    let basis = basis_upto(space, window, x0_cap)?;
    Ok(first_failure(&basis, |b| {
        let a = q1.apply(&q2.apply_monomial(b));
        let c = q2.apply(&q1.apply_monomial(b));
        if both_odd {
            a.add(&c)
        } else {
            a.sub(&c)
        }
    }))
}

fn pattern_weight(p: &Pattern, w: &TorusWeights) -> i64 {
    p.letters.iter().map(|l| w.of_family(l.family, l.direction)).sum()
}

/// Distinct torus weights of the charge's patterns.
pub fn torus_profile(charge: &SymbolicCharge, weights: &TorusWeights) -> Result<BTreeSet<i64>> {
    if weights.dim() != charge.dim {
        return Err(Error::DimensionMismatch { expected: charge.dim, found: weights.dim() });
    }
    Ok(charge
        .patterns
        .iter()
        .filter(|p| !p.coeff.is_zero())
        .map(|p| pattern_weight(p, weights))
        .collect())
}

/// True iff every pattern has total torus weight 0.
pub fn validate_homogeneity(charge: &SymbolicCharge, weights: &TorusWeights) -> bool {
    torus_profile(charge, weights).is_ok_and(|p| p.iter().all(|&t| t == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::state_from_text;
    use crate::fock::make_space;

    fn st(t: &str) -> State {
        state_from_text(1, &[(1, t)]).unwrap()
    }

    #[test]
    fn de_rham_examples() {
        let o = make_space(Side::Omega, 1).unwrap();
        let d = instantiate_charge(&chiral_de_rham(1), &o, 2).unwrap();
        assert_eq!(d.apply(&st("x_0")), st("phi_0"));
        assert_eq!(d.apply(&st("psi_1")), st("y_1"));
        assert!(d.apply(&State::vacuum()).is_zero());
    }

    #[test]
    fn potential_examples() {
        let t = make_space(Side::Theta, 1).unwrap();
        let q = instantiate_charge(&potential_charge(&Potential::power(2), Side::Theta), &t, 0).unwrap();
        assert_eq!(q.apply(&st("psi_0")), st("x_0").scale(&coeff(2)));

        let o = make_space(Side::Omega, 1).unwrap();
        for d in 1..=3u32 {
            let q = instantiate_charge(&potential_charge(&Potential::power(d + 1), Side::Omega), &o, 0).unwrap();
            for k in 0..3usize {
                let xs = vec!["x_0"; k].join(" ");
                let xk = if k == 0 { State::vacuum() } else { st(&xs) };
                let mut img = vec!["x_0"; k + d as usize];
                img.push("phi_0");
                assert_eq!(q.apply(&xk), st(&img.join(" ")).scale(&coeff(d as i64 + 1)));
            }
        }

        let q = instantiate_charge(&potential_charge(&Potential::power(2), Side::Omega), &o, 1).unwrap();
        let expected = state_from_text(1, &[(2, "x_1"), (2, "x_0 phi_0 psi_1")]).unwrap();
        assert_eq!(q.apply(&st("psi_1")), expected);
    }

    #[test]
    fn potential_rejects_bad_terms() {
        assert!(Potential::new(2, vec![(coeff(1), vec![1])]).is_err());
        assert!(Potential::new(1, vec![(coeff(1), vec![2]), (coeff(3), vec![2])]).is_err());
    }

    #[test]
    fn homogeneity_examples() {
        let f = Potential::power(3);
        let w = TorusWeights::from_x_phi(vec![1], vec![-2]).unwrap();
        assert!(validate_homogeneity(&potential_charge(&f, Side::Omega), &w));
        let w = TorusWeights::from_x_phi(vec![1], vec![-1]).unwrap();
        assert!(!validate_homogeneity(&potential_charge(&f, Side::Omega), &w));
        let g = Potential::new(2, vec![(coeff(1), vec![2, 1])]).unwrap();
        let w = TorusWeights::new(vec![1, 2], vec![-3, -2], vec![3, 2]).unwrap();
        assert!(validate_homogeneity(&potential_charge(&g, Side::Theta), &w));
        assert_eq!(g.torus_weights(Some(vec![1, 2])).unwrap(), w);
    }

    #[test]
    fn default_weights_for_powers() {
        for n in 2..=6u32 {
            let w = Potential::power(n).torus_weights(None).unwrap();
            assert_eq!(w.x(), &[1]);
            assert_eq!(w.phi(), &[1 - n as i64]);
        }
    }

    #[test]
    fn structure_constant_validation() {
        assert_eq!(StructureConstants::sl2().get(3, 2, 1), coeff(-1));
        let bad = StructureConstants::from_entries(2, &[(1, 1, 2, coeff(1)), (1, 2, 1, coeff(1))]);
        assert!(matches!(bad, Err(Error::NotAntisymmetric { .. })));
        // [e1,e2] = e3, [e1,e3] = e1 breaks Jacobi.
        let bad = StructureConstants::from_entries(3, &[(3, 1, 2, coeff(1)), (1, 1, 3, coeff(1))]);
        assert!(matches!(bad, Err(Error::JacobiFailure { .. })));
    }

    #[test]
    fn abelian_lie_charge_is_zero() {
        let t = make_space(Side::Theta, 2).unwrap();
        let q = instantiate_charge(&lie_charge(&StructureConstants::abelian(2)), &t, 2).unwrap();
        assert!(q.terms().is_empty());
    }

    #[test]
    fn potential_charges_square_to_zero() {
        let o = make_space(Side::Omega, 1).unwrap();
        let q = potential_charge(&Potential::power(3), Side::Omega);
        assert!(check_nilpotent(&q, &o, 4, 3).unwrap().passed());
        let a = potential_charge(&Potential::power(2), Side::Omega);
        assert!(check_anticommute(&a, &q, &o, 2, 3).unwrap().passed());
        let d = chiral_de_rham(1);
        assert!(check_anticommute(&d, &d, &o, 3, 3).unwrap().passed());
        assert!(check_anticommute(&d, &a, &o, 3, 3).unwrap().passed());
    }

    #[test]
    fn jacobi_violation_is_detected_by_the_square() {
        let t = make_space(Side::Theta, 3).unwrap();
        let bad = StructureConstants::from_fn_unchecked(3, |k, i, j| {
            let s = |a: usize, b: usize, c: usize, v: i64| {
                if (k, i, j) == (a, b, c) {
                    coeff(v)
                } else if (k, i, j) == (a, c, b) {
                    coeff(-v)
                } else {
                    Coeff::zero()
                }
            };
            s(3, 1, 2, 1) + s(1, 1, 3, 1)
        });
        assert!(!bad.jacobi_violations().is_empty());
        let report = check_nilpotent(&lie_charge(&bad), &t, 1, 1).unwrap();
        assert!(!report.passed());
    }
}
