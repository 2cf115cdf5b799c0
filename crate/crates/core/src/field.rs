//! State–field correspondence for composite states.
//!
//! Fields are expanded as `a(z) = Σ_n a_(n) z^n`, and `a_(n)` shifts conformal
//! weight by `q_a + n` where `q_a` is the weight of `a`. The generator field of
//! `u_h Ω` (with `h` the creator threshold of `u`) is `u(z) = Σ_i u_i z^{i-h}`,
//! so its modes are `u_(n) = u_{n+h}`. A general monomial `u_k · b` is
//! reconstructed as the normally ordered product
//! `:(1/(k-h)!) ∂^{k-h} u(z) · Y(b, z):`, whose modes are
//! `U_(p) = C(p+k-h, k-h) u_{p+k}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::fock::{coeff, Coeff, ModeKey, Monomial, SpaceSpec, State};
use crate::oper::act_mode;

/// Generalized binomial `C(t, m) = t(t-1)…(t-m+1)/m!` for any integer `t`.
fn binom(t: i64, m: i64) -> Coeff {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..m {
        num *= BigInt::from(t - i);
        den *= BigInt::from(i + 1);
    }
    BigRational::new(num, den)
}

fn monomial_mode(space: &SpaceSpec, a: &[ModeKey], n: i64, v: &Monomial) -> State {
    let Some((u, b)) = a.split_first() else {
        return if n == 0 { State::from_monomial(v.clone()) } else { State::zero() };
    };
    let k = u.index as i64;
    let h = space.threshold(u.family) as i64;
    let m = k - h;
    let wt_v = v.weight();
    let q_b: i64 = b.iter().map(|x| x.weight()).sum();
    let b_odd = b.iter().filter(|x| x.is_fermion()).count() % 2 == 1;
    let mut out = State::zero();

    // Creator part: p ≥ 0 (the binomial vanishes for -m ≤ p < 0); b_(n-p) v
    // must have nonnegative weight.
    for p in 0..=(wt_v + q_b + n) {
        let inner = monomial_mode(space, b, n - p, v);
        if inner.is_zero() {
            continue;
        }
        let mode = ModeKey::new(u.family, u.direction, (p + k) as i32);
        let c = binom(p + m, m);
        for (mono, x) in inner.terms() {
            if let Some((f, prod)) = act_mode(space, mode, mono) {
                out.add_term(prod, x * &c * coeff(f));
            }
        }
    }

    // Annihilator part, with the Koszul sign of moving U past Y(b).
    let sign = if u.is_fermion() && b_odd { -1 } else { 1 };
    for p in (-wt_v - k)..=(h - k - 1) {
        let mode = ModeKey::new(u.family, u.direction, (p + k) as i32);
        let Some((f, lowered)) = act_mode(space, mode, v) else {
            continue;
        };
        let c = binom(p + m, m) * coeff(f * sign);
        out.add_scaled(&monomial_mode(space, b, n - p, &lowered), &c);
    }
    out
}

/// `a_(n) v`. The vector `a` must be homogeneous in conformal weight.
pub fn field_mode(space: &SpaceSpec, a: &State, n: i64, v: &State) -> Result<State> {
    if a.is_zero() {
        return Ok(State::zero());
    }
    if a.homogeneous_weight().is_none() {
        return Err(Error::Inhomogeneous);
    }
    for (m, _) in a.terms().chain(v.terms()) {
        for u in m.modes() {
            space.check_direction(u)?;
        }
    }
    let mut out = State::zero();
    for (am, ac) in a.terms() {
        for (vm, vc) in v.terms() {
            out.add_scaled(&monomial_mode(space, am.modes(), n, vm), &(ac * vc));
        }
    }
    Ok(out)
}

/// The BRST charge `a_(-1)` of a weight-1, degree-1 vector.
#[derive(Debug, Clone)]
pub struct ResidueCharge {
    space: SpaceSpec,
    vector: State,
}

/// Wraps `a` as the operator `v ↦ a_(-1) v` after checking the BRST contract.
pub fn residue_charge(space: &SpaceSpec, a: &State) -> Result<ResidueCharge> {
    if !a.is_zero() {
        match a.homogeneous_weight() {
            Some(1) => {}
            Some(w) => return Err(Error::BrstContract(format!("vector has conformal weight {w}, need 1"))),
            None => return Err(Error::Inhomogeneous),
        }
        if let Some((m, _)) = a.terms().find(|(m, _)| m.degree() != 1) {
            return Err(Error::BrstContract(format!("term {m} has cohomological degree {}, need +1", m.degree())));
        }
    }
    Ok(ResidueCharge { space: *space, vector: a.clone() })
}

impl ResidueCharge {
    pub fn vector(&self) -> &State {
        &self.vector
    }

    pub fn apply(&self, v: &State) -> State {
        field_mode(&self.space, &self.vector, -1, v).expect("vector validated at construction")
    }
}

/// Convenience: `Σ_j` of a list of (coefficient, monomial text) pairs.
pub fn state_from_text(dim: usize, parts: &[(i64, &str)]) -> Result<State> {
    let mut s = State::zero();
    for (c, text) in parts {
        let (neg, m) = Monomial::parse(text, dim)?;
        s.add_term(m, coeff(if neg { -c } else { *c }));
    }
    Ok(s)
}
