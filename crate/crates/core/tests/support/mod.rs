//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use chiral_lg::{Coeff, StructureConstants};
use num_traits::{One, Zero};

/// Rank over ℚ by plain dense Gaussian elimination.
pub fn dense_rank(mut rows: Vec<Vec<Coeff>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = Coeff::one() / &rows[rank][col];
        let pivot: Vec<Coeff> = rows[rank].iter().map(|x| x * &inv).collect();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..ncols {
                    let delta = &f * &pivot[c];
                    rows[r][c] -= delta;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

fn multisets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// `[e_a, e_b] = Σ_l c^l_{ab} e_l` with 0-based indices.
fn bracket(c: &StructureConstants, a: usize, b: usize) -> Vec<(usize, Coeff)> {
    (0..c.dim()).map(|l| (l, c.get(l + 1, a + 1, b + 1))).filter(|(_, v)| !v.is_zero()).collect()
}

/// Adjoint action of `e_i` on a monomial of `Sⁿ𝔤`, extended as a derivation.
fn act_sym(c: &StructureConstants, i: usize, m: &[usize]) -> Vec<(Vec<usize>, Coeff)> {
    let mut out = Vec::new();
    for pos in 0..m.len() {
        for (l, v) in bracket(c, i, m[pos]) {
            let mut m2 = m.to_vec();
            m2[pos] = l;
            m2.sort();
            out.push((m2, v));
        }
    }
    out
}

/// Sorts `seq` (distinct entries), returning the permutation sign, or `None`
/// if an entry repeats.
fn sort_sign(seq: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 0..seq.len() {
        for j in 0..seq.len() - 1 - i {
            if seq[j] == seq[j + 1] {
                return None;
            }
            if seq[j] > seq[j + 1] {
                seq.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if seq.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

/// `dim Hᵖ(𝔤, Sⁿ𝔤)` for `p = 0..=dim 𝔤`, from the Chevalley–Eilenberg complex
/// `Hom(Λᵖ𝔤, Sⁿ𝔤)` with the textbook differential.
pub fn ce_cohomology_sym(c: &StructureConstants, n: usize) -> Vec<usize> {
    let g = c.dim();
    let module = multisets(g, n);
    let mindex = |m: &Vec<usize>| module.iter().position(|x| x == m).unwrap();
    let cochains: Vec<Vec<(Vec<usize>, usize)>> = (0..=g)
        .map(|p| subsets(g, p).into_iter().flat_map(|s| (0..module.len()).map(move |m| (s.clone(), m))).collect())
        .collect();
    let mut ranks = vec![0usize; g + 1];
    for p in 0..g {
        let dom = &cochains[p];
        let cod = &cochains[p + 1];
        let cindex = |s: &Vec<usize>, m: usize| cod.iter().position(|(t, k)| t == s && *k == m).unwrap();
        // Rows: codomain basis, columns: domain basis.
        let mut mat = vec![vec![Coeff::zero(); dom.len()]; cod.len()];
        for (col, (set, m)) in dom.iter().enumerate() {
            for j in subsets(g, p + 1) {
                // Σ_i (−1)^i e_{j_i} · ω(ĵ_i)
                for i in 0..=p {
                    let mut rest = j.clone();
                    let gi = rest.remove(i);
                    if &rest == set {
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        for (m2, v) in act_sym(c, gi, &module[*m]) {
                            mat[cindex(&j, mindex(&m2))][col] += v * Coeff::from_integer(sign.into());
                        }
                    }
                }
                // Σ_{a<b} (−1)^{a+b} ω([e_{j_a}, e_{j_b}], ĵ_a, ĵ_b)
                for a in 0..=p {
                    for b in a + 1..=p {
                        let rest: Vec<usize> = j.iter().enumerate().filter(|(k, _)| *k != a && *k != b).map(|(_, &x)| x).collect();
                        for (l, v) in bracket(c, j[a], j[b]) {
                            let mut args = vec![l];
                            args.extend(&rest);
                            let Some(s) = sort_sign(&mut args) else { continue };
                            if &args == set {
                                let sign = if (a + b) % 2 == 0 { s } else { -s };
                                mat[cindex(&j, *m)][col] += v * Coeff::from_integer(sign.into());
                            }
                        }
                    }
                }
            }
        }
        ranks[p] = dense_rank(mat);
    }
    (0..=g)
        .map(|p| cochains[p].len() - ranks[p] - if p > 0 { ranks[p - 1] } else { 0 })
        .collect()
}
