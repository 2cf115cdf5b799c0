//! Graded Fock spaces of the free fields x, y (bosons) and ψ, φ (fermions) on
//! affine d-space.
//!
//! A state is a finite rational combination of [`Monomial`]s: sorted products of
//! creator modes applied to the vacuum. Which modes are creators depends on the
//! [`Side`]: the polyvector side Θ has ψ₀ as a creator and φ₀ as an
//! annihilator, the forms side Ω the other way round.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact coefficient type used everywhere in the engine.
pub type Coeff = BigRational;

pub(crate) fn coeff(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

/// Generator family. The derived order X < Y < Psi < Phi is the global
/// canonical order used for monomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    X,
    Y,
    Psi,
    Phi,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::X, Family::Y, Family::Psi, Family::Phi];

    pub fn is_fermion(self) -> bool {
        matches!(self, Family::Psi | Family::Phi)
    }

    /// Cohomological degree of a single mode.
    pub fn degree(self) -> i64 {
        match self {
            Family::Phi => 1,
            Family::Psi => -1,
            Family::X | Family::Y => 0,
        }
    }

    /// The family this one pairs with in the commutation relations.
    pub fn partner(self) -> Family {
        match self {
            Family::X => Family::Y,
            Family::Y => Family::X,
            Family::Psi => Family::Phi,
            Family::Phi => Family::Psi,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Family::X => "x",
            Family::Y => "y",
            Family::Psi => "psi",
            Family::Phi => "phi",
        }
    }
}

/// One generator mode `u^j_i`. The mode index equals the conformal weight it
/// carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeKey {
    pub family: Family,
    pub direction: u16,
    pub index: i32,
}

impl ModeKey {
    pub fn new(family: Family, direction: u16, index: i32) -> Self {
        ModeKey { family, direction, index }
    }
    pub fn x(direction: u16, index: i32) -> Self {
        Self::new(Family::X, direction, index)
    }
    pub fn y(direction: u16, index: i32) -> Self {
        Self::new(Family::Y, direction, index)
    }
    pub fn psi(direction: u16, index: i32) -> Self {
        Self::new(Family::Psi, direction, index)
    }
    pub fn phi(direction: u16, index: i32) -> Self {
        Self::new(Family::Phi, direction, index)
    }

    pub fn is_fermion(&self) -> bool {
        self.family.is_fermion()
    }

    pub fn weight(&self) -> i64 {
        self.index as i64
    }

    pub fn degree(&self) -> i64 {
        self.family.degree()
    }

    /// The creator an annihilator differentiates against, or vice versa.
    pub fn partner(&self) -> ModeKey {
        ModeKey::new(self.family.partner(), self.direction, -self.index)
    }

    /// Fixture label: `x2_1`, or `x_1` when the ambient dimension is 1.
    pub fn label(&self, dim: usize) -> String {
        if dim == 1 {
            format!("{}_{}", self.family.symbol(), self.index)
        } else {
            format!("{}{}_{}", self.family.symbol(), self.direction, self.index)
        }
    }

    pub fn parse(token: &str, dim: usize) -> Result<ModeKey> {
        let (family, rest) = [Family::Phi, Family::Psi, Family::X, Family::Y]
            .iter()
            .find_map(|f| token.strip_prefix(f.symbol()).map(|r| (*f, r)))
            .ok_or_else(|| Error::Parse(format!("unknown mode `{token}`")))?;
        let (dir, idx) = rest
            .split_once('_')
            .ok_or_else(|| Error::Parse(format!("mode `{token}` lacks `_index`")))?;
        let direction = if dir.is_empty() {
            if dim != 1 {
                return Err(Error::Parse(format!("mode `{token}` needs a direction when d = {dim}")));
            }
            1
        } else {
            dir.parse::<u16>().map_err(|_| Error::Parse(format!("bad direction in `{token}`")))?
        };
        let index = idx.parse::<i32>().map_err(|_| Error::Parse(format!("bad index in `{token}`")))?;
        Ok(ModeKey::new(family, direction, index))
    }
}

impl fmt::Display for ModeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}_{}", self.family.symbol(), self.direction, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// Chiral polyvector fields Θ^ch.
    Theta,
    /// Chiral differential forms Ω^ch.
    Omega,
}

/// Θ^ch or Ω^ch on affine `dim`-space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceSpec {
    side: Side,
    dim: u16,
}

/// Builds the space and its creator thresholds.
pub fn make_space(side: Side, dim: usize) -> Result<SpaceSpec> {
    if dim < 1 || dim > u16::MAX as usize {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(SpaceSpec { side, dim: dim as u16 })
}

impl SpaceSpec {
    pub fn new(side: Side, dim: usize) -> Result<Self> {
        make_space(side, dim)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Minimal creator index of a family.
    pub fn threshold(&self, family: Family) -> i32 {
        match (self.side, family) {
            (_, Family::X) => 0,
            (_, Family::Y) => 1,
            (Side::Theta, Family::Psi) | (Side::Omega, Family::Phi) => 0,
            (Side::Theta, Family::Phi) | (Side::Omega, Family::Psi) => 1,
        }
    }

    pub fn is_creator(&self, mode: &ModeKey) -> bool {
        mode.index >= self.threshold(mode.family)
    }

    /// The fermion whose zero mode is a creator (ψ on Θ, φ on Ω).
    pub fn zero_fermion(&self) -> Family {
        match self.side {
            Side::Theta => Family::Psi,
            Side::Omega => Family::Phi,
        }
    }

    pub fn check_direction(&self, mode: &ModeKey) -> Result<()> {
        if mode.direction == 0 || mode.direction > self.dim {
            return Err(Error::DirectionOutOfRange { mode: mode.to_string(), dim: self.dim() });
        }
        Ok(())
    }
}

/// Sorts `modes` into canonical order. Returns the Koszul sign of the
/// permutation, or `None` when a fermion repeats.
pub(crate) fn sort_with_sign(modes: &mut [ModeKey]) -> Option<bool> {
    let mut negative = false;
    for i in 1..modes.len() {
        let mut j = i;
        while j > 0 && modes[j - 1] > modes[j] {
            if modes[j - 1].is_fermion() && modes[j].is_fermion() {
                negative = !negative;
            }
            modes.swap(j - 1, j);
            j -= 1;
        }
    }
    if modes.windows(2).any(|w| w[0] == w[1] && w[0].is_fermion()) {
        return None;
    }
    Some(negative)
}

/// A canonically ordered product of creator modes applied to the vacuum.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<ModeKey>);

impl Monomial {
    pub fn vacuum() -> Self {
        Monomial(Vec::new())
    }

    /// Caller guarantees canonical order and no repeated fermion.
    pub(crate) fn from_sorted(modes: Vec<ModeKey>) -> Self {
        debug_assert!(modes.windows(2).all(|w| w[0] <= w[1]));
        Monomial(modes)
    }

    /// Sorts an arbitrary product; returns the sign and the monomial, or
    /// `None` if the product vanishes.
    pub fn from_modes(modes: &[ModeKey]) -> Option<(bool, Monomial)> {
        let mut v = modes.to_vec();
        let neg = sort_with_sign(&mut v)?;
        Some((neg, Monomial(v)))
    }

    pub fn modes(&self) -> &[ModeKey] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> i64 {
        self.0.iter().map(|m| m.weight()).sum()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|m| m.degree()).sum()
    }

    /// True when the number of fermionic letters is odd.
    pub fn is_odd(&self) -> bool {
        self.0.iter().filter(|m| m.is_fermion()).count() % 2 == 1
    }

    pub fn count(&self, mode: &ModeKey) -> usize {
        self.0.iter().filter(|m| *m == mode).count()
    }

    /// `mode · self`. Returns (negative sign?, product) or `None` for a
    /// repeated fermion.
    pub fn multiply_left(&self, mode: ModeKey) -> Option<(bool, Monomial)> {
        let pos = self.0.partition_point(|m| *m <= mode);
        if mode.is_fermion() {
            if pos > 0 && self.0[pos - 1] == mode {
                return None;
            }
            let passed = self.0[..pos].iter().filter(|m| m.is_fermion()).count();
            let mut v = self.0.clone();
            v.insert(pos, mode);
            Some((passed % 2 == 1, Monomial(v)))
        } else {
            let mut v = self.0.clone();
            v.insert(pos, mode);
            Some((false, Monomial(v)))
        }
    }

    /// Left (super-)derivative ∂/∂`mode`. Returns the integer factor
    /// (multiplicity for bosons, ±1 for fermions) and the remaining monomial.
    pub fn derivative(&self, mode: &ModeKey) -> Option<(i64, Monomial)> {
        let pos = self.0.iter().position(|m| m == mode)?;
        let factor = if mode.is_fermion() {
            let passed = self.0[..pos].iter().filter(|m| m.is_fermion()).count();
            if passed % 2 == 1 {
                -1
            } else {
                1
            }
        } else {
            self.count(mode) as i64
        };
        let mut v = self.0.clone();
        v.remove(pos);
        Some((factor, Monomial(v)))
    }

    /// Product `self · other`, normalized.
    pub fn concat(&self, other: &Monomial) -> Option<(bool, Monomial)> {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Monomial::from_modes(&v)
    }

    pub fn to_text(&self, dim: usize) -> String {
        if self.0.is_empty() {
            return "vac".to_string();
        }
        self.0.iter().map(|m| m.label(dim)).collect::<Vec<_>>().join(" ")
    }

    /// Parses the fixture form, e.g. `x1_0 x1_1 phi1_2` or `vac`. The
    /// result is normalized; a sign from reordering is returned.
    pub fn parse(text: &str, dim: usize) -> Result<(bool, Monomial)> {
        let text = text.trim();
        if text == "vac" || text.is_empty() {
            return Ok((false, Monomial::vacuum()));
        }
        let modes = text
            .split_whitespace()
            .map(|t| ModeKey::parse(t, dim))
            .collect::<Result<Vec<_>>>()?;
        Monomial::from_modes(&modes)
            .ok_or_else(|| Error::Parse(format!("`{text}` repeats a fermion and vanishes")))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "vac");
        }
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Finite exact linear combination of monomials. Zero coefficients are never
/// stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct State {
    terms: BTreeMap<Monomial, Coeff>,
}

impl State {
    pub fn zero() -> Self {
        State::default()
    }

    pub fn vacuum() -> Self {
        State::from_monomial(Monomial::vacuum())
    }

    pub fn from_monomial(m: Monomial) -> Self {
        State::term(m, Coeff::one())
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        let mut s = State::zero();
        s.add_term(m, c);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &State, c: &Coeff) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn add(&self, other: &State) -> State {
        let mut s = self.clone();
        s.add_scaled(other, &Coeff::one());
        s
    }

    pub fn sub(&self, other: &State) -> State {
        let mut s = self.clone();
        s.add_scaled(other, &-Coeff::one());
        s
    }

    pub fn scale(&self, c: &Coeff) -> State {
        let mut s = State::zero();
        s.add_scaled(self, c);
        s
    }

    /// Common conformal weight of all terms, if homogeneous. The zero state
    /// reports `None`.
    pub fn homogeneous_weight(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.weight());
        let w = it.next()?;
        it.all(|x| x == w).then_some(w)
    }

    pub fn to_text(&self, dim: usize) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(m, c)| {
                if c.is_one() {
                    m.to_text(dim)
                } else if (-c).is_one() {
                    format!("-{}", m.to_text(dim))
                } else if c.is_negative() {
                    format!("-({}) {}", -c, m.to_text(dim))
                } else {
                    format!("({}) {}", c, m.to_text(dim))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl FromIterator<(Monomial, Coeff)> for State {
    fn from_iter<I: IntoIterator<Item = (Monomial, Coeff)>>(iter: I) -> Self {
        let mut s = State::zero();
        for (m, c) in iter {
            s.add_term(m, c);
        }
        s
    }
}

/// Normalizes a raw product of creators into canonical form with its Koszul
/// sign.
pub fn normalize(space: &SpaceSpec, modes: &[ModeKey], c: Coeff) -> Result<State> {
    for m in modes {
        space.check_direction(m)?;
        if !space.is_creator(m) {
            return Err(Error::NotCreator(m.to_string()));
        }
    }
    Ok(match Monomial::from_modes(modes) {
        None => State::zero(),
        Some((neg, m)) => State::term(m, if neg { -c } else { c }),
    })
}

/// Torus weights on the generators. y carries −wx so that x·y is neutral;
/// φ and ψ must be conjugate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusWeights {
    x: Vec<i64>,
    phi: Vec<i64>,
    psi: Vec<i64>,
}

impl TorusWeights {
    pub fn new(x: Vec<i64>, phi: Vec<i64>, psi: Vec<i64>) -> Result<Self> {
        if x.is_empty() || phi.len() != x.len() || psi.len() != x.len() {
            return Err(Error::InvalidTorusWeights(format!(
                "need one weight per direction for x, phi, psi (got {}, {}, {})",
                x.len(),
                phi.len(),
                psi.len()
            )));
        }
        if let Some(j) = (0..x.len()).find(|&j| phi[j] + psi[j] != 0) {
            return Err(Error::InvalidTorusWeights(format!(
                "phi and psi weights in direction {} do not cancel ({} + {})",
                j + 1,
                phi[j],
                psi[j]
            )));
        }
        Ok(TorusWeights { x, phi, psi })
    }

    /// `wx` given, `wφ = −wψ = phi`.
    pub fn from_x_phi(x: Vec<i64>, phi: Vec<i64>) -> Result<Self> {
        let psi = phi.iter().map(|p| -p).collect();
        Self::new(x, phi, psi)
    }

    /// x carries weight 1 and φ matches it: the grading that makes the chiral
    /// de Rham differential homogeneous.
    pub fn de_rham(dim: usize) -> Self {
        TorusWeights { x: vec![1; dim], phi: vec![1; dim], psi: vec![-1; dim] }
    }

    /// Polynomial degree in the x letters; fermions neutral.
    pub fn polynomial_degree(dim: usize) -> Self {
        TorusWeights { x: vec![1; dim], phi: vec![0; dim], psi: vec![0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[i64] {
        &self.x
    }
    pub fn phi(&self) -> &[i64] {
        &self.phi
    }
    pub fn psi(&self) -> &[i64] {
        &self.psi
    }

    pub fn of(&self, mode: &ModeKey) -> i64 {
        let j = mode.direction as usize - 1;
        match mode.family {
            Family::X => self.x[j],
            Family::Y => -self.x[j],
            Family::Phi => self.phi[j],
            Family::Psi => self.psi[j],
        }
    }

    pub fn of_family(&self, family: Family, direction: u16) -> i64 {
        self.of(&ModeKey::new(family, direction, 0))
    }

    pub fn of_monomial(&self, m: &Monomial) -> i64 {
        m.modes().iter().map(|u| self.of(u)).sum()
    }
}

/// (conformal weight, cohomological degree, optional torus weight).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BiGrade {
    pub weight: i64,
    pub degree: i64,
    pub torus: Option<i64>,
}

impl BiGrade {
    pub fn new(weight: i64, degree: i64, torus: Option<i64>) -> Self {
        BiGrade { weight, degree, torus }
    }
}

pub fn grade(m: &Monomial, weights: Option<&TorusWeights>) -> BiGrade {
    BiGrade {
        weight: m.weight(),
        degree: m.degree(),
        torus: weights.map(|w| w.of_monomial(m)),
    }
}

/// Constraints for [`enumerate_basis`]. Weight-0 pieces are infinite unless an
/// x0 cap or a regularizing torus weight is supplied.
#[derive(Debug, Clone, Default)]
pub struct BasisQuery {
    pub degree: Option<i64>,
    pub torus: Option<(TorusWeights, i64)>,
    /// Cap on the total degree in the x₀ letters.
    pub x0_cap: Option<u32>,
    /// Drop the weight-0 fermion (ψ₀ on Θ, φ₀ on Ω).
    pub exclude_zero_fermions: bool,
}

impl BasisQuery {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn degree(mut self, d: i64) -> Self {
        self.degree = Some(d);
        self
    }
    pub fn torus(mut self, weights: TorusWeights, t: i64) -> Self {
        self.torus = Some((weights, t));
        self
    }
    pub fn x0_cap(mut self, cap: u32) -> Self {
        self.x0_cap = Some(cap);
        self
    }
    pub fn without_zero_fermions(mut self) -> Self {
        self.exclude_zero_fermions = true;
        self
    }
}

/// Every creator other than x₀ that can occur at conformal weight ≤ `weight`.
fn rest_generators(space: &SpaceSpec, weight: u32, zero_fermions: bool) -> Vec<ModeKey> {
    let mut out = Vec::new();
    for family in Family::ALL {
        for dir in 1..=space.dim {
            let lo = space.threshold(family);
            for idx in lo..=weight as i32 {
                if idx == 0 && (!family.is_fermion() || !zero_fermions) {
                    continue;
                }
                out.push(ModeKey::new(family, dir, idx));
            }
        }
    }
    out.sort();
    out
}

fn enumerate_rest(gens: &[ModeKey], remaining: i64, cur: &mut Vec<ModeKey>, out: &mut Vec<Vec<ModeKey>>) {
    let Some((g, tail)) = gens.split_first() else {
        if remaining == 0 {
            out.push(cur.clone());
        }
        return;
    };
    let w = g.weight();
    let max_mult = if g.is_fermion() {
        if w <= remaining {
            1
        } else {
            0
        }
    } else {
        remaining / w
    };
    let base = cur.len();
    for mult in 0..=max_mult {
        if mult > 0 {
            cur.push(*g);
        }
        enumerate_rest(tail, remaining - mult * w, cur, out);
    }
    cur.truncate(base);
}

/// Exponent vectors for x₀^j with total degree ≤ cap and/or weighted sum
/// equal to the torus target.
fn enumerate_x0(
    dirs: usize,
    cap: Option<u32>,
    target: Option<(&[i64], i64)>,
) -> Result<Vec<Vec<u32>>> {
    if cap.is_none() {
        match target {
            None => {
                let name = if dirs == 1 { "x_0".to_string() } else { "x1_0".to_string() };
                return Err(Error::Unbounded(name));
            }
            Some((wx, _)) => {
                if let Some(j) = wx.iter().position(|&w| w == 0) {
                    return Err(Error::Unbounded(ModeKey::x(j as u16 + 1, 0).label(dirs)));
                }
                if let Some(j) = wx.iter().position(|&w| w.signum() != wx[0].signum()) {
                    return Err(Error::Unbounded(ModeKey::x(j as u16 + 1, 0).label(dirs)));
                }
            }
        }
    }
    fn rec(
        j: usize,
        dirs: usize,
        left_deg: Option<u32>,
        left_torus: Option<(&[i64], i64)>,
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if j == dirs {
            if left_torus.map_or(true, |(_, t)| t == 0) {
                out.push(cur.clone());
            }
            return;
        }
        let mut bound = left_deg.unwrap_or(u32::MAX);
        if let Some((wx, t)) = left_torus {
            let w = wx[j];
            if w != 0 && left_deg.is_none() {
                if t.signum() != w.signum() && t != 0 {
                    return;
                }
                bound = bound.min((t / w) as u32);
            }
        }
        for e in 0..=bound {
            cur.push(e);
            let ld = left_deg.map(|d| d - e);
            let lt = left_torus.map(|(wx, t)| (wx, t - wx[j] * e as i64));
            rec(j + 1, dirs, ld, lt, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, dirs, cap, target, &mut Vec::new(), &mut out);
    Ok(out)
}

/// All monomials of conformal weight `weight` meeting the query, sorted
/// canonically and without duplicates.
pub fn enumerate_basis(space: &SpaceSpec, weight: u32, query: &BasisQuery) -> Result<Vec<Monomial>> {
    if let Some((w, _)) = &query.torus {
        if w.dim() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: w.dim() });
        }
    }
    let gens = rest_generators(space, weight, !query.exclude_zero_fermions);
    let mut rests = Vec::new();
    enumerate_rest(&gens, weight as i64, &mut Vec::new(), &mut rests);

    let mut out = Vec::new();
    for rest in rests {
        let deg: i64 = rest.iter().map(|m| m.degree()).sum();
        if query.degree.is_some_and(|d| d != deg) {
            continue;
        }
        let target = query.torus.as_ref().map(|(w, t)| {
            let tr: i64 = rest.iter().map(|m| w.of(m)).sum();
            (w.x(), t - tr)
        });
        for exps in enumerate_x0(space.dim(), query.x0_cap, target)? {
            let mut modes = rest.clone();
            for (j, &e) in exps.iter().enumerate() {
                modes.extend(std::iter::repeat(ModeKey::x(j as u16 + 1, 0)).take(e as usize));
            }
            modes.sort();
            out.push(Monomial::from_sorted(modes));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// All monomials of conformal weight `weight` whose torus weight is at most
/// `t_max`, grouped by `(torus weight, cohomological degree)`. Every x-weight
/// must be positive, which makes each group finite.
pub fn enumerate_torus_range(
    space: &SpaceSpec,
    weight: u32,
    weights: &TorusWeights,
    t_max: i64,
) -> Result<BTreeMap<(i64, i64), Vec<Monomial>>> {
    if weights.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: weights.dim() });
    }
    if let Some(j) = weights.x().iter().position(|&w| w <= 0) {
        return Err(Error::Unbounded(ModeKey::x(j as u16 + 1, 0).label(space.dim())));
    }
    let gens = rest_generators(space, weight, true);
    let mut rests = Vec::new();
    enumerate_rest(&gens, weight as i64, &mut Vec::new(), &mut rests);

    fn rec(j: usize, wx: &[i64], budget: i64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if j == wx.len() {
            out.push(cur.clone());
            return;
        }
        let mut e = 0;
        while e as i64 * wx[j] <= budget {
            cur.push(e);
            rec(j + 1, wx, budget - e as i64 * wx[j], cur, out);
            cur.pop();
            e += 1;
        }
    }

    let mut out: BTreeMap<(i64, i64), Vec<Monomial>> = BTreeMap::new();
    for rest in rests {
        let deg: i64 = rest.iter().map(|m| m.degree()).sum();
        let tr: i64 = rest.iter().map(|m| weights.of(m)).sum();
        if tr > t_max {
            continue;
        }
        let mut exps = Vec::new();
        rec(0, weights.x(), t_max - tr, &mut Vec::new(), &mut exps);
        for e in exps {
            let mut modes = rest.clone();
            let mut t = tr;
            for (j, &k) in e.iter().enumerate() {
                modes.extend(std::iter::repeat(ModeKey::x(j as u16 + 1, 0)).take(k as usize));
                t += weights.x()[j] * k as i64;
            }
            modes.sort();
            out.entry((t, deg)).or_default().push(Monomial::from_sorted(modes));
        }
    }
    for v in out.values_mut() {
        v.sort();
        v.dedup();
    }
    Ok(out)
}
