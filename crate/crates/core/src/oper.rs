//! Mode operators on the Fock spaces.
//!
//! Creators act by multiplication. Annihilators act as derivations that kill
//! the vacuum, normalized so that `[y_i, x_j] = δ_{i+j,0}` and
//! `[ψ_i, φ_j]₊ = δ_{i+j,0}` hold literally:
//!
//! * `y_{-m} = ∂/∂x_m`, `x_{-m} = -∂/∂y_m`
//! * `φ_{-m} = ∂/∂ψ_m`, `ψ_{-m} = ∂/∂φ_m` (left odd derivations)

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fock::{coeff, sort_with_sign, Coeff, Family, ModeKey, Monomial, Side, SpaceSpec, State};

/// Action of one mode on one monomial: at most one monomial comes out.
pub(crate) fn act_mode(space: &SpaceSpec, mode: ModeKey, m: &Monomial) -> Option<(i64, Monomial)> {
    if space.is_creator(&mode) {
        let (neg, p) = m.multiply_left(mode)?;
        Some((if neg { -1 } else { 1 }, p))
    } else {
        let (f, p) = m.derivative(&mode.partner())?;
        let f = if mode.family == Family::X { -f } else { f };
        Some((f, p))
    }
}

/// Applies `modes` right to left to a monomial.
pub(crate) fn act_modes(space: &SpaceSpec, modes: &[ModeKey], m: &Monomial) -> Option<(i64, Monomial)> {
    let mut factor = 1i64;
    let mut cur = m.clone();
    for mode in modes.iter().rev() {
        let (f, next) = act_mode(space, *mode, &cur)?;
        factor = factor.checked_mul(f).expect("mode multiplicity overflow");
        cur = next;
    }
    Some((factor, cur))
}

/// Applies a single (creator or annihilator) mode to a state.
pub fn apply_mode(space: &SpaceSpec, mode: ModeKey, state: &State) -> Result<State> {
    space.check_direction(&mode)?;
    let mut out = State::zero();
    for (m, c) in state.terms() {
        if let Some((f, p)) = act_mode(space, mode, m) {
            out.add_term(p, c * coeff(f));
        }
    }
    Ok(out)
}

/// A normally ordered product of modes with an exact coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorTerm {
    pub coeff: Coeff,
    pub modes: Vec<ModeKey>,
}

impl OperatorTerm {
    /// Validates directions and normal order (no creator right of an
    /// annihilator).
    pub fn new(space: &SpaceSpec, coeff: Coeff, modes: Vec<ModeKey>) -> Result<Self> {
        for m in &modes {
            space.check_direction(m)?;
        }
        let mut seen_annihilator = false;
        for m in &modes {
            if space.is_creator(m) {
                if seen_annihilator {
                    let s: Vec<String> = modes.iter().map(|m| m.to_string()).collect();
                    return Err(Error::NotNormallyOrdered(s.join(" ")));
                }
            } else {
                seen_annihilator = true;
            }
        }
        Ok(OperatorTerm { coeff, modes })
    }

    pub fn weight(&self) -> i64 {
        self.modes.iter().map(|m| m.weight()).sum()
    }

    pub fn degree(&self) -> i64 {
        self.modes.iter().map(|m| m.degree()).sum()
    }

    pub fn is_odd(&self) -> bool {
        self.modes.iter().filter(|m| m.is_fermion()).count() % 2 == 1
    }
}

impl fmt::Display for OperatorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.modes.iter().map(|m| m.to_string()).collect();
        write!(f, "({}) :{}:", self.coeff, s.join(" "))
    }
}

/// Applies a normally ordered term to a state.
pub fn apply_term(space: &SpaceSpec, term: &OperatorTerm, state: &State) -> Result<State> {
    for m in &term.modes {
        space.check_direction(m)?;
    }
    let mut out = State::zero();
    for (m, c) in state.terms() {
        if let Some((f, p)) = act_modes(space, &term.modes, m) {
            out.add_term(p, c * &term.coeff * coeff(f));
        }
    }
    Ok(out)
}

/// Puts a product of modes into normal order: creators left, annihilators
/// right, each block canonically sorted. Returns the Koszul sign, or `None`
/// if a fermion repeats inside a block.
pub(crate) fn normal_order(space: &SpaceSpec, modes: &[ModeKey]) -> Option<(bool, Vec<ModeKey>)> {
    let mut negative = false;
    let mut creators = Vec::new();
    let mut annihilators: Vec<ModeKey> = Vec::new();
    for m in modes {
        if space.is_creator(m) {
            if m.is_fermion() && annihilators.iter().filter(|a| a.is_fermion()).count() % 2 == 1 {
                negative = !negative;
            }
            creators.push(*m);
        } else {
            annihilators.push(*m);
        }
    }
    negative ^= sort_with_sign(&mut creators)?;
    negative ^= sort_with_sign(&mut annihilators)?;
    creators.extend(annihilators);
    Some((negative, creators))
}

/// One field letter of a charge pattern: the mode index assigned to it is
/// shifted by `offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub family: Family,
    pub direction: u16,
    pub offset: i32,
}

impl Letter {
    pub fn new(family: Family, direction: u16) -> Self {
        Letter { family, direction, offset: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub coeff: Coeff,
    pub letters: Vec<Letter>,
}

/// A differential given as a finite sum of field-monomial patterns. Each
/// pattern stands for the sum over all integer mode assignments whose indices
/// add up to `weight_shift` (plus the letter offsets).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicCharge {
    pub dim: usize,
    /// Side the charge is meant for; `None` acts on either.
    pub side: Option<Side>,
    pub weight_shift: i32,
    pub patterns: Vec<Pattern>,
}

impl SymbolicCharge {
    pub fn zero(dim: usize, side: Option<Side>) -> Self {
        SymbolicCharge { dim, side, weight_shift: 0, patterns: Vec::new() }
    }

    /// Sum of two charges on the same space.
    pub fn plus(&self, other: &SymbolicCharge) -> Result<SymbolicCharge> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if let (Some(a), Some(b)) = (self.side, other.side) {
            if a != b {
                return Err(Error::SideMismatch { expected: a, found: b });
            }
        }
        if self.weight_shift != other.weight_shift {
            return Err(Error::BrstContract("summands shift weight differently".into()));
        }
        let mut patterns = self.patterns.clone();
        patterns.extend(other.patterns.iter().cloned());
        Ok(SymbolicCharge {
            dim: self.dim,
            side: self.side.or(other.side),
            weight_shift: self.weight_shift,
            patterns,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.patterns.iter().all(|p| p.coeff.is_zero())
    }

    /// The common cohomological degree (#φ − #ψ) of the nonzero patterns, or
    /// `None` for the zero charge. Mixed degrees are rejected.
    pub fn degree(&self) -> Result<Option<i64>> {
        let mut degs = self.patterns.iter().filter(|p| !p.coeff.is_zero()).map(|p| {
            p.letters.iter().map(|l| l.family.degree()).sum::<i64>()
        });
        let Some(first) = degs.next() else {
            return Ok(None);
        };
        if degs.any(|d| d != first) {
            return Err(Error::BrstContract("patterns of different cohomological degree".into()));
        }
        Ok(Some(first))
    }
}

/// A charge expanded into normally ordered terms for a weight window, indexed
/// for fast application.
#[derive(Debug, Clone)]
pub struct InstantiatedCharge {
    space: SpaceSpec,
    window: u32,
    terms: Vec<OperatorTerm>,
    free: Vec<usize>,
    by_partner: HashMap<ModeKey, Vec<usize>>,
}

impl InstantiatedCharge {
    fn build(space: SpaceSpec, window: u32, terms: Vec<OperatorTerm>) -> Self {
        let mut free = Vec::new();
        let mut by_partner: HashMap<ModeKey, Vec<usize>> = HashMap::new();
        for (i, t) in terms.iter().enumerate() {
            let least = t.modes.iter().filter(|m| !space.is_creator(m)).map(|m| m.partner()).min();
            match least {
                None => free.push(i),
                Some(p) => by_partner.entry(p).or_default().push(i),
            }
        }
        InstantiatedCharge { space, window, terms, free, by_partner }
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    /// States of weight above the window may see an incomplete expansion.
    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn terms(&self) -> &[OperatorTerm] {
        &self.terms
    }

    pub fn apply_monomial(&self, m: &Monomial) -> State {
        let mut out = State::zero();
        let mut hit = |i: usize| {
            let t = &self.terms[i];
            if let Some((f, p)) = act_modes(&self.space, &t.modes, m) {
                out.add_term(p, &t.coeff * coeff(f));
            }
        };
        for &i in &self.free {
            hit(i);
        }
        let mut last = None;
        for mode in m.modes() {
            if last == Some(*mode) {
                continue;
            }
            last = Some(*mode);
            if let Some(ids) = self.by_partner.get(mode) {
                for &i in ids {
                    hit(i);
                }
            }
        }
        out
    }

    pub fn apply(&self, s: &State) -> State {
        let mut out = State::zero();
        for (m, c) in s.terms() {
            out.add_scaled(&self.apply_monomial(m), c);
        }
        out
    }
}

fn assign_indices(k: usize, target: i64, lo: i64, hi: i64, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
    if cur.len() + 1 == k {
        if (lo..=hi).contains(&target) {
            cur.push(target as i32);
            out.push(cur.clone());
            cur.pop();
        }
        return;
    }
    for n in lo..=hi {
        cur.push(n as i32);
        assign_indices(k, target - n, lo, hi, cur, out);
        cur.pop();
    }
}

/// Expands a symbolic charge into the normally ordered terms that can act
/// nonzero on some state of weight ≤ `window`.
pub fn instantiate_charge(charge: &SymbolicCharge, space: &SpaceSpec, window: u32) -> Result<InstantiatedCharge> {
    if charge.dim != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: charge.dim });
    }
    if let Some(side) = charge.side {
        if side != space.side() {
            return Err(Error::SideMismatch { expected: side, found: space.side() });
        }
    }
    let w = window as i64;
    let mut acc: BTreeMap<Vec<ModeKey>, Coeff> = BTreeMap::new();
    for pat in &charge.patterns {
        if pat.coeff.is_zero() || pat.letters.is_empty() {
            continue;
        }
        for l in &pat.letters {
            space.check_direction(&ModeKey::new(l.family, l.direction, 0))?;
        }
        let target = charge.weight_shift as i64 + pat.letters.iter().map(|l| l.offset as i64).sum::<i64>();
        let mut assignments = Vec::new();
        assign_indices(pat.letters.len(), target, -w, w + target.max(0), &mut Vec::new(), &mut assignments);
        for idx in assignments {
            let modes: Vec<ModeKey> = pat
                .letters
                .iter()
                .zip(&idx)
                .map(|(l, &i)| ModeKey::new(l.family, l.direction, i))
                .collect();
            let lowering: i64 = modes.iter().filter(|m| !space.is_creator(m)).map(|m| m.weight()).sum();
            let raising: i64 = modes.iter().filter(|m| space.is_creator(m)).map(|m| m.weight()).sum();
            if lowering < -w || raising > w + target.max(0) {
                continue;
            }
            let Some((neg, ordered)) = normal_order(space, &modes) else {
                continue;
            };
            let c = if neg { -pat.coeff.clone() } else { pat.coeff.clone() };
            *acc.entry(ordered).or_insert_with(Coeff::zero) += c;
        }
    }
    let terms = acc
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(modes, coeff)| OperatorTerm { coeff, modes })
        .collect();
    Ok(InstantiatedCharge::build(*space, window, terms))
}

/// The translation operator T: an even derivation with
/// `T(u_k Ω) = (k + 1 − h_u) u_{k+1} Ω`, `h_u` the creator threshold of u.
pub fn translate(space: &SpaceSpec, state: &State) -> State {
    let mut out = State::zero();
    for (m, c) in state.terms() {
        let modes = m.modes();
        for (pos, u) in modes.iter().enumerate() {
            let factor = u.index as i64 + 1 - space.threshold(u.family) as i64;
            if factor == 0 {
                continue;
            }
            let mut raised = modes.to_vec();
            raised[pos] = ModeKey::new(u.family, u.direction, u.index + 1);
            if let Some((neg, p)) = Monomial::from_modes(&raised) {
                let f = if neg { -factor } else { factor };
                out.add_term(p, c * coeff(f));
            }
        }
    }
    out
}

/// Supercommutator `[A, B] = AB − (−1)^{|A||B|} BA` of two modes on a state.
pub fn supercommutator(space: &SpaceSpec, a: ModeKey, b: ModeKey, v: &State) -> Result<State> {
    let ab = apply_mode(space, a, &apply_mode(space, b, v)?)?;
    let ba = apply_mode(space, b, &apply_mode(space, a, v)?)?;
    Ok(if a.is_fermion() && b.is_fermion() { ab.add(&ba) } else { ab.sub(&ba) })
}
