//! Truncated series in `q` whose coefficients are Laurent series in `z` with
//! integer coefficients. Every row carries the `z`-window on which it is known
//! exactly and a bound on where it can be nonzero at all; arithmetic shrinks
//! the windows pessimistically so a reported coefficient is never a guess.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

const NEG_INF: i64 = i64::MIN;
const POS_INF: i64 = i64::MAX;

fn sat_add(a: i64, b: i64) -> i64 {
    if a == NEG_INF || b == NEG_INF {
        if a == POS_INF || b == POS_INF {
            // Only reached for empty rows, which callers skip.
            return 0;
        }
        NEG_INF
    } else if a == POS_INF || b == POS_INF {
        POS_INF
    } else {
        a.saturating_add(b)
    }
}

/// One `q`-row: exact on `[lo, hi]`, zero outside `[smin, smax]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    lo: i64,
    hi: i64,
    smin: i64,
    smax: i64,
    coeffs: BTreeMap<i64, BigInt>,
}

impl Row {
    /// A row known on `[lo, hi]` with support bounds `[smin, smax]`. Entries
    /// outside `[lo, hi]` are dropped; the window is widened to infinity on any
    /// side where the support bound is already inside it.
    pub fn new(lo: i64, hi: i64, smin: i64, smax: i64, coeffs: BTreeMap<i64, BigInt>) -> Self {
        let mut r = Row { lo, hi, smin, smax, coeffs };
        r.coeffs.retain(|e, c| !c.is_zero() && *e >= lo && *e <= hi);
        r.normalize();
        r
    }

    /// A Laurent polynomial known everywhere.
    pub fn exact(coeffs: BTreeMap<i64, BigInt>) -> Self {
        let mut coeffs = coeffs;
        coeffs.retain(|_, c| !c.is_zero());
        let smin = coeffs.keys().next().copied().unwrap_or(POS_INF);
        let smax = coeffs.keys().next_back().copied().unwrap_or(NEG_INF);
        Row { lo: NEG_INF, hi: POS_INF, smin, smax, coeffs }
    }

    fn normalize(&mut self) {
        if self.smin > self.smax {
            self.lo = NEG_INF;
            self.hi = POS_INF;
            return;
        }
        if self.lo <= self.hi {
            if self.smin >= self.lo {
                self.lo = NEG_INF;
            }
            if self.smax <= self.hi {
                self.hi = POS_INF;
            }
        }
    }

    fn is_empty_support(&self) -> bool {
        self.smin > self.smax
    }

    /// The window on which the row is exact (`i64::MIN`/`i64::MAX` mean
    /// unbounded). An empty window has `lo > hi`.
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn support(&self) -> (i64, i64) {
        (self.smin, self.smax)
    }

    pub fn is_known(&self, e: i64) -> bool {
        (self.lo <= e && e <= self.hi) || e < self.smin || e > self.smax
    }

    /// The coefficient of `z^e`, or `None` outside the exact window.
    pub fn get(&self, e: i64) -> Option<BigInt> {
        self.is_known(e).then(|| self.coeffs.get(&e).cloned().unwrap_or_else(BigInt::zero))
    }

    /// Known nonzero coefficients.
    pub fn coefficients(&self) -> &BTreeMap<i64, BigInt> {
        &self.coeffs
    }
}

fn neg_row(r: &Row) -> Row {
    Row { coeffs: r.coeffs.iter().map(|(e, c)| (*e, -c)).collect(), ..r.clone() }
}

/// `Σ a·b` over the given row pairs (all contributing to one `q`-power).
fn mul_rows<'a>(pairs: impl Iterator<Item = (&'a Row, &'a Row)> + Clone) -> Row {
    let mut lo = NEG_INF;
    let mut hi = POS_INF;
    let mut smin = POS_INF;
    let mut smax = NEG_INF;
    for (a, b) in pairs.clone() {
        if a.is_empty_support() || b.is_empty_support() {
            continue;
        }
        smin = smin.min(sat_add(a.smin, b.smin));
        smax = smax.max(sat_add(a.smax, b.smax));
        if a.lo > NEG_INF {
            lo = lo.max(sat_add(a.lo, b.smax));
        }
        if b.lo > NEG_INF {
            lo = lo.max(sat_add(b.lo, a.smax));
        }
        if a.hi < POS_INF {
            hi = hi.min(sat_add(a.hi, b.smin));
        }
        if b.hi < POS_INF {
            hi = hi.min(sat_add(b.hi, a.smin));
        }
    }
    let mut coeffs = BTreeMap::<i64, BigInt>::new();
    for (a, b) in pairs {
        for (ea, ca) in &a.coeffs {
            for (eb, cb) in &b.coeffs {
                let e = ea + eb;
                if e >= lo && e <= hi {
                    *coeffs.entry(e).or_insert_with(BigInt::zero) += ca * cb;
                }
            }
        }
    }
    Row::new(lo, hi, smin, smax, coeffs)
}

/// A series `Σ_{n ≤ q_max} q^n R_n(z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    rows: Vec<Row>,
}

impl TruncatedSeries {
    /// Series with rows `0..rows.len()`; `q_max = rows.len() - 1`.
    pub fn from_rows(rows: Vec<Row>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Series("a series needs at least the q^0 row".into()));
        }
        Ok(TruncatedSeries { rows })
    }

    /// The zero series, exact everywhere.
    pub fn zero(q_max: u32) -> Self {
        TruncatedSeries { rows: vec![Row::exact(BTreeMap::new()); q_max as usize + 1] }
    }

    /// The constant `1`.
    pub fn one(q_max: u32) -> Self {
        Self::monomial(q_max, 0, 0, BigInt::one())
    }

    /// `c q^n z^e`.
    pub fn monomial(q_max: u32, n: u32, e: i64, c: BigInt) -> Self {
        let mut s = Self::zero(q_max);
        if (n as usize) < s.rows.len() {
            s.rows[n as usize] = Row::exact(BTreeMap::from([(e, c)]));
        }
        s
    }

    /// A finite polynomial given as `(q power, z power, coefficient)` triples.
    pub fn polynomial(q_max: u32, terms: &[(u32, i64, i64)]) -> Self {
        let mut maps = vec![BTreeMap::<i64, BigInt>::new(); q_max as usize + 1];
        for &(n, e, c) in terms {
            if (n as usize) < maps.len() {
                *maps[n as usize].entry(e).or_insert_with(BigInt::zero) += c;
            }
        }
        TruncatedSeries { rows: maps.into_iter().map(Row::exact).collect() }
    }

    pub fn q_max(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row(&self, n: u32) -> Option<&Row> {
        self.rows.get(n as usize)
    }

    /// Coefficient of `q^n z^e`, if known.
    pub fn get(&self, n: u32, e: i64) -> Option<BigInt> {
        self.row(n)?.get(e)
    }

    /// Keeps rows `0..=q_max`.
    pub fn truncate_q(&self, q_max: u32) -> Self {
        TruncatedSeries { rows: self.rows[..=(q_max.min(self.q_max()) as usize)].to_vec() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.rows.len().min(other.rows.len());
        let rows = (0..n)
            .map(|i| {
                let (a, b) = (&self.rows[i], &other.rows[i]);
                let lo = a.lo.max(b.lo);
                let hi = a.hi.min(b.hi);
                let mut coeffs = a.coeffs.clone();
                for (e, c) in &b.coeffs {
                    *coeffs.entry(*e).or_insert_with(BigInt::zero) += c;
                }
                Row::new(lo, hi, a.smin.min(b.smin), a.smax.max(b.smax), coeffs)
            })
            .collect();
        TruncatedSeries { rows }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { rows: self.rows.iter().map(neg_row).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product; the window of each row is the largest on which every
    /// contributing pair of coefficients is known.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.rows.len().min(other.rows.len());
        let rows = (0..n)
            .map(|k| mul_rows((0..=k).map(|i| (&self.rows[i], &other.rows[k - i]))))
            .collect();
        TruncatedSeries { rows }
    }

    /// Multiplicative inverse. The `q⁰` row must be an exactly known
    /// `±z^s(1 − z·u(z))` with `u` a polynomial; `1/(1 − z·u)` is expanded in
    /// nonnegative powers of `z` up to absolute exponent `z_cutoff`.
    pub fn invert(&self, z_cutoff: i64) -> Result<Self> {
        let r0 = &self.rows[0];
        if r0.lo != NEG_INF || r0.hi != POS_INF {
            return Err(Error::Series("q^0 row of the divisor must be known exactly".into()));
        }
        let Some((&s, lead)) = r0.coeffs.iter().next() else {
            return Err(Error::Series("q^0 row of the divisor vanishes".into()));
        };
        if !(lead.is_one() || (-lead).is_one()) {
            return Err(Error::Series(format!("leading coefficient {lead} is not a unit")));
        }
        let eps = lead.clone();
        // g(z) = 1 − ε z^{-s} R_0, a polynomial with zero constant term.
        let g: Vec<(i64, BigInt)> = r0.coeffs.iter().skip(1).map(|(e, c)| (e - s, -(c * &eps))).collect();
        let top = z_cutoff + s;
        if top < 0 {
            return Err(Error::Series(format!("z cutoff {z_cutoff} lies below the leading exponent {}", -s)));
        }
        let mut c = vec![BigInt::zero(); top as usize + 1];
        c[0] = BigInt::one();
        for m in 1..=top as usize {
            let mut acc = BigInt::zero();
            for (e, gc) in &g {
                let e = *e as usize;
                if e <= m {
                    acc += gc * &c[m - e];
                }
            }
            c[m] = acc;
        }
        let coeffs = c.into_iter().enumerate().map(|(m, x)| (m as i64 - s, x * &eps)).collect();
        let b0 = Row::new(NEG_INF, z_cutoff, -s, POS_INF, coeffs);

        let mut rows = vec![b0];
        for n in 1..self.rows.len() {
            // B_n = −B_0 Σ_{k=1}^n A_k B_{n−k}.
            let s_n = mul_rows((1..=n).map(|k| (&self.rows[k], &rows[n - k])));
            rows.push(neg_row(&mul_rows(std::iter::once((&rows[0], &s_n)))));
        }
        Ok(TruncatedSeries { rows })
    }

    /// Substitution `z → sign · z^k` with `k ≠ 0`.
    pub fn substitute(&self, sign: i8, k: i64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Series("substitution z -> z^0 is not invertible".into()));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Series("substitution sign must be +1 or -1".into()));
        }
        let map = |e: i64| -> i64 {
            if e == NEG_INF {
                if k > 0 {
                    NEG_INF
                } else {
                    POS_INF
                }
            } else if e == POS_INF {
                if k > 0 {
                    POS_INF
                } else {
                    NEG_INF
                }
            } else {
                e.saturating_mul(k)
            }
        };
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let coeffs = r
                    .coeffs
                    .iter()
                    .map(|(e, c)| {
                        let c = if sign < 0 && e.rem_euclid(2) == 1 { -c } else { c.clone() };
                        (e * k, c)
                    })
                    .collect();
                let (lo, hi, smin, smax) =
                    if k > 0 { (map(r.lo), map(r.hi), map(r.smin), map(r.smax)) } else { (map(r.hi), map(r.lo), map(r.smax), map(r.smin)) };
                if r.is_empty_support() {
                    Row::exact(BTreeMap::new())
                } else {
                    Row::new(lo, hi, smin, smax, coeffs)
                }
            })
            .collect();
        Ok(TruncatedSeries { rows })
    }

    /// Multiplication by `z^a`.
    pub fn shift_z(&self, a: i64) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                if r.is_empty_support() {
                    return r.clone();
                }
                let coeffs = r.coeffs.iter().map(|(e, c)| (e + a, c.clone())).collect();
                Row::new(sat_add(r.lo, a), sat_add(r.hi, a), sat_add(r.smin, a), sat_add(r.smax, a), coeffs)
            })
            .collect();
        TruncatedSeries { rows }
    }

    /// Multiplication by `q^b`; rows pushed past `q_max` are dropped.
    pub fn shift_q(&self, b: u32) -> Self {
        let q_max = self.q_max() as usize;
        let mut rows = vec![Row::exact(BTreeMap::new()); (b as usize).min(q_max + 1)];
        rows.extend(self.rows.iter().take((q_max + 1).saturating_sub(b as usize)).cloned());
        TruncatedSeries { rows }
    }

    /// Forgets everything outside `[zmin, zmax]`.
    pub fn restrict(&self, zmin: i64, zmax: i64) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut coeffs = r.coeffs.clone();
                coeffs.retain(|e, _| *e >= zmin && *e <= zmax);
                let mut row = Row { lo: r.lo.max(zmin), hi: r.hi.min(zmax), smin: r.smin, smax: r.smax, coeffs };
                // Knowledge of zeros beyond the support survives restriction
                // only inside the requested window.
                if r.smin >= zmin && r.lo == NEG_INF {
                    row.lo = zmin;
                }
                if r.smax <= zmax && r.hi == POS_INF {
                    row.hi = zmax;
                }
                row.smin = row.smin.max(zmin);
                row.smax = row.smax.min(zmax);
                if row.smin > row.smax {
                    row.smin = zmin;
                    row.smax = zmax;
                }
                row
            })
            .collect();
        TruncatedSeries { rows }
    }

    /// True iff every row is exact on `[zmin, zmax]`.
    pub fn covers(&self, zmin: i64, zmax: i64) -> bool {
        self.rows.iter().all(|r| (zmin..=zmax).all(|e| r.is_known(e)))
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, r) in self.rows.iter().enumerate() {
            for (e, c) in &r.coeffs {
                let sign = if c.is_negative() { "-" } else { "+" };
                if first {
                    if c.is_negative() {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {sign} ")?;
                }
                first = false;
                write!(f, "{}", c.abs())?;
                if n > 0 {
                    write!(f, " q^{n}")?;
                }
                if *e != 0 {
                    write!(f, " z^{e}")?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.rows.len())
    }
}

/// `θ_q(z) = Π_{n≥0}(1 − qⁿz)(1 − q^{n+1}z^{-1})`, exact through `q^{q_max}`.
pub fn theta(q_max: u32) -> TruncatedSeries {
    let mut acc = TruncatedSeries::one(q_max);
    for n in 0..=q_max {
        acc = acc.mul(&TruncatedSeries::polynomial(q_max, &[(0, 0, 1), (n, 1, -1)]));
        acc = acc.mul(&TruncatedSeries::polynomial(q_max, &[(0, 0, 1), (n + 1, -1, -1)]));
    }
    acc
}

/// `−z^{-d} θ_q(z^d) θ_q(z)^{-1}` on `[zmin, zmax]`, through `q^{q_max}`.
pub fn chi_closed_form(d: u32, q_max: u32, z_window: (i64, i64)) -> Result<TruncatedSeries> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let (zmin, zmax) = z_window;
    if zmin > zmax {
        return Err(Error::Series(format!("empty z window [{zmin}, {zmax}]")));
    }
    let th = theta(q_max);
    let num = th.substitute(1, d as i64)?;
    let mut cutoff = zmax + d as i64 + 4 * (q_max as i64 + 1) * (d as i64 + 1);
    loop {
        let series = num.mul(&th.invert(cutoff)?).shift_z(-(d as i64)).neg();
        if series.covers(zmin, zmax) {
            return Ok(series.restrict(zmin, zmax));
        }
        if cutoff > zmax + 1_000_000 {
            return Err(Error::Series("inversion cutoff did not converge".into()));
        }
        cutoff = 2 * cutoff.max(1);
    }
}

/// Result of a coefficientwise comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Comparison {
    /// Equal on every row; per-row windows actually compared.
    Equal { windows: Vec<(i64, i64)> },
    Mismatch { q: u32, z: i64, left: BigInt, right: BigInt },
}

impl Comparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, Comparison::Equal { .. })
    }
}

/// Compares on the intersection of the exact windows, rows `0..=min q_max`.
/// Unbounded intersections are clipped to the span of stored coefficients.
pub fn compare(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<Comparison> {
    let n = a.rows.len().min(b.rows.len());
    let mut windows = Vec::with_capacity(n);
    for q in 0..n {
        let (ra, rb) = (&a.rows[q], &b.rows[q]);
        let lo = ra.lo.max(rb.lo);
        let hi = ra.hi.min(rb.hi);
        if lo > hi {
            return Err(Error::Series(format!("validity windows of row q^{q} do not intersect")));
        }
        let keys = ra.coeffs.keys().chain(rb.coeffs.keys());
        let span_lo = keys.clone().min().copied().unwrap_or(0);
        let span_hi = keys.max().copied().unwrap_or(0);
        let clo = if lo == NEG_INF { span_lo.min(hi) } else { lo };
        let chi = if hi == POS_INF { span_hi.max(clo) } else { hi };
        for e in clo..=chi {
            let (x, y) = (ra.get(e), rb.get(e));
            match (x, y) {
                (Some(x), Some(y)) if x != y => {
                    return Ok(Comparison::Mismatch { q: q as u32, z: e, left: x, right: y });
                }
                _ => {}
            }
        }
        windows.push((lo, hi));
    }
    Ok(Comparison::Equal { windows })
}
