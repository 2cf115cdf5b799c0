mod support;

use chiral_lg::{
    cohomology_dims, enumerate_basis, grade, lie_charge, make_space, normalize, potential_charge, BasisQuery, Coeff,
    Family, ModeKey, Monomial, Potential, Side, State, StructureConstants, TorusWeights, Truncation,
};
use num_traits::One;
use proptest::prelude::*;

fn mode_strategy(side: Side, dim: u16) -> impl Strategy<Value = ModeKey> {
    let families = prop_oneof![Just(Family::X), Just(Family::Y), Just(Family::Psi), Just(Family::Phi)];
    (families, 1..=dim, 0..4i32).prop_map(move |(f, j, i)| {
        let space = make_space(side, dim as usize).unwrap();
        ModeKey::new(f, j, i.max(space.threshold(f)))
    })
}

fn side_strategy() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Theta), Just(Side::Omega)]
}

proptest! {
    #[test]
    fn normalize_is_idempotent(side in side_strategy(), modes in prop::collection::vec(mode_strategy(Side::Theta, 2), 0..7)) {
        let space = make_space(side, 2).unwrap();
        let modes: Vec<ModeKey> = modes.into_iter().map(|m| ModeKey::new(m.family, m.direction, m.index.max(space.threshold(m.family)))).collect();
        let once = normalize(&space, &modes, Coeff::one()).unwrap();
        for (m, c) in once.terms() {
            let twice = normalize(&space, m.modes(), c.clone()).unwrap();
            prop_assert_eq!(twice, State::term(m.clone(), c.clone()));
        }
    }

    #[test]
    fn reordering_changes_at_most_the_sign(modes in prop::collection::vec(mode_strategy(Side::Omega, 2), 0..6), seed in any::<u64>()) {
        let space = make_space(Side::Omega, 2).unwrap();
        let mut shuffled = modes.clone();
        let n = shuffled.len();
        if n > 1 {
            shuffled.swap((seed % n as u64) as usize, ((seed / 7) % n as u64) as usize);
        }
        let a = normalize(&space, &modes, Coeff::one()).unwrap();
        let b = normalize(&space, &shuffled, Coeff::one()).unwrap();
        prop_assert!(a == b || a == b.scale(&-Coeff::one()));
    }

    #[test]
    fn grades_add_under_products(a in prop::collection::vec(mode_strategy(Side::Theta, 2), 0..4),
                                 b in prop::collection::vec(mode_strategy(Side::Theta, 2), 0..4)) {
        let w = TorusWeights::new(vec![2, 3], vec![1, -1], vec![-1, 1]).unwrap();
        let (Some((_, ma)), Some((_, mb))) = (Monomial::from_modes(&a), Monomial::from_modes(&b)) else { return Ok(()) };
        if let Some((_, mab)) = ma.concat(&mb) {
            let (ga, gb, gab) = (grade(&ma, Some(&w)), grade(&mb, Some(&w)), grade(&mab, Some(&w)));
            prop_assert_eq!(gab.weight, ga.weight + gb.weight);
            prop_assert_eq!(gab.degree, ga.degree + gb.degree);
            prop_assert_eq!(gab.torus.unwrap(), ga.torus.unwrap() + gb.torus.unwrap());
        }
    }
}

/// Coefficients of `Π_{i≥1} (1+q^i)^2 / (1-q^i)^2` through `q^n`.
fn positive_mode_partitions(n: usize) -> Vec<u64> {
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for i in 1..=n {
        for _ in 0..2 {
            // × (1 + q^i)
            for k in (i..=n).rev() {
                p[k] += p[k - i];
            }
            // × 1/(1 - q^i)
            for k in i..=n {
                p[k] += p[k - i];
            }
        }
    }
    p
}

#[test]
fn positive_mode_counts_match_the_product_formula() {
    let expected = positive_mode_partitions(8);
    for side in [Side::Theta, Side::Omega] {
        let space = make_space(side, 1).unwrap();
        for (w, &count) in expected.iter().enumerate() {
            let basis = enumerate_basis(&space, w as u32, &BasisQuery::new().x0_cap(0).without_zero_fermions()).unwrap();
            assert_eq!(basis.len() as u64, count, "{side:?} weight {w}");
        }
    }
}

#[test]
fn enumeration_is_sorted_and_duplicate_free() {
    let space = make_space(Side::Omega, 2).unwrap();
    for w in 0..=4 {
        let basis = enumerate_basis(&space, w, &BasisQuery::new().x0_cap(2)).unwrap();
        assert!(basis.windows(2).all(|p| p[0] < p[1]), "weight {w}");
        assert!(basis.iter().all(|m| m.weight() == w as i64));
    }
}

fn weight_zero_lie_cohomology(c: &StructureConstants, n_max: i64) -> Vec<Vec<usize>> {
    let theta = make_space(Side::Theta, c.dim()).unwrap();
    let trunc = Truncation::new(TorusWeights::polynomial_degree(c.dim()), n_max).unwrap();
    let table = cohomology_dims(&lie_charge(c), &theta, 0, &trunc).unwrap();
    assert!(table.euler_poincare_holds());
    (0..=n_max)
        .map(|n| {
            let piece = table.weights[0].pieces.get(&n).cloned().unwrap_or_default();
            (0..=c.dim() as i64).map(|p| piece.cohomology.get(&-p).copied().unwrap_or(0)).collect()
        })
        .collect()
}

#[test]
fn ce_oracle_on_abelian_algebra_is_binomial() {
    let binom = |n: usize, k: usize| -> usize { (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1)) };
    for n in 1..=3 {
        for k in 0..=2 {
            let dims = support::ce_cohomology_sym(&StructureConstants::abelian(n), k);
            let expected: Vec<usize> = (0..=n).map(|p| binom(n, p) * binom(n + k - 1, k)).collect();
            assert_eq!(dims, expected, "abelian n={n}, S^{k}");
        }
    }
}

#[test]
fn heisenberg_charge_cohomology_matches_ce() {
    let c = StructureConstants::heisenberg();
    let ours = weight_zero_lie_cohomology(&c, 2);
    for (n, row) in ours.iter().enumerate() {
        assert_eq!(row, &support::ce_cohomology_sym(&c, n), "S^{n}");
    }
}

#[test]
fn affine_line_charge_cohomology_matches_ce() {
    let c = StructureConstants::affine_line();
    let ours = weight_zero_lie_cohomology(&c, 3);
    for (n, row) in ours.iter().enumerate() {
        assert_eq!(row, &support::ce_cohomology_sym(&c, n), "S^{n}");
    }
}

#[test]
fn milnor_number_of_two_variable_potentials() {
    // x^3 + y^3 has Milnor number 4, x^2 y + y^4 (D5) has 5.
    let cases = [(vec![(1, vec![3, 0]), (1, vec![0, 3])], 4usize), (vec![(1, vec![2, 1]), (1, vec![0, 4])], 5)];
    let theta = make_space(Side::Theta, 2).unwrap();
    for (terms, mu) in cases {
        let f = Potential::new(2, terms.into_iter().map(|(c, e)| (Coeff::from_integer(c.into()), e)).collect()).unwrap();
        let weights = f.torus_weights(None).unwrap();
        let min = *weights.x().iter().min().unwrap() as i64;
        let mut previous = None;
        for cap in [6i64, 7] {
            let trunc = Truncation::new(weights.clone(), cap * min).unwrap();
            let table = cohomology_dims(&potential_charge(&f, Side::Theta), &theta, 0, &trunc).unwrap();
            assert!(table.stabilized(), "{f:?} cap {cap}");
            assert_eq!(table.dim(0, 0), mu, "{f:?} cap {cap}");
            let dims: Vec<_> = table.weights[0].total.cohomology.iter().filter(|(_, v)| **v > 0).map(|(k, v)| (*k, *v)).collect();
            assert_eq!(dims, vec![(0, mu)]);
            if let Some(p) = previous.replace(dims.clone()) {
                assert_eq!(p, dims);
            }
        }
    }
}
