mod common;

use common::det_laplace;
use cp2slice::seifert::{pretzel3_seifert, twist_seifert, SeifertMatrix};
use cp2slice::upperbound::{
    complete_basis, decomposition_search, framing_form, genus_one_top_bound, is_unit_monomial,
    verify_decomposition, DecompositionConfig, GenusOneBound,
};
use proptest::prelude::*;

/// `det(tB - B^T)` at integer `t`.
fn pencil_at(b: &[Vec<i64>], t: i128) -> i128 {
    let n = b.len();
    let m: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| t * b[i][j] as i128 - b[j][i] as i128)
                .collect()
        })
        .collect();
    det_laplace(&m)
}

/// A polynomial of degree at most `n` equal to `±t^k` at `n + 1` points is `±t^k`.
fn unit_monomial_by_evaluation(b: &[Vec<i64>]) -> bool {
    let n = b.len();
    let at2 = pencil_at(b, 2);
    if at2 == 0 || (at2.unsigned_abs() & (at2.unsigned_abs() - 1)) != 0 {
        return false;
    }
    let k = at2.unsigned_abs().trailing_zeros();
    let sign = at2.signum();
    [3i128, 5, 7, 11, 13, 17, 19][..n.max(1)]
        .iter()
        .all(|&t| pencil_at(b, t) == sign * t.pow(k))
}

/// Every `B = A + c c^T` with `c` in the full box, no symmetry reduction.
fn naive_rank_one(a: &SeifertMatrix, bound: i64) -> bool {
    let n = a.size();
    let side = (2 * bound + 1) as usize;
    (1..side.pow(n as u32)).any(|code| {
        let mut k = code;
        let c: Vec<i64> = (0..n)
            .map(|_| {
                let d = (k % side) as i64 - bound;
                k /= side;
                d
            })
            .collect();
        let b: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| a.entries()[i][j] + c[i] * c[j]).collect())
            .collect();
        unit_monomial_by_evaluation(&b)
    })
}

fn genus_one() -> impl Strategy<Value = SeifertMatrix> {
    (-9i64..=9, -9i64..=8, -9i64..=9, any::<bool>()).prop_map(|(a, b, c, flip)| {
        let e = if flip {
            vec![vec![a, b], vec![b + 1, c]]
        } else {
            vec![vec![a, b + 1], vec![b, c]]
        };
        SeifertMatrix::new(e).unwrap()
    })
}

fn genus_two() -> impl Strategy<Value = SeifertMatrix> {
    (genus_one(), genus_one()).prop_map(|(a, b)| a.connected_sum(&b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn unit_monomial_test_matches_evaluation(b in prop::collection::vec(-4i64..=4, 16), size in prop::sample::select(vec![2usize, 4])) {
        let m: Vec<Vec<i64>> = (0..size).map(|i| b[i * 4..i * 4 + size].to_vec()).collect();
        prop_assert_eq!(is_unit_monomial(&m), unit_monomial_by_evaluation(&m));
    }

    #[test]
    fn reduced_search_matches_unreduced_genus_one(a in genus_one(), bound in 0i64..=2) {
        let cfg = DecompositionConfig { n_max: 1, coeff_bound: bound, basis_depth: 0, budget: u64::MAX };
        let found = decomposition_search(&a, &cfg).unwrap();
        let naive = unit_monomial_by_evaluation(a.entries()) || naive_rank_one(&a, bound);
        prop_assert_eq!(found.is_some(), naive);
        if let Some(d) = found {
            prop_assert!(verify_decomposition(&a, &d).unwrap());
        }
    }

    #[test]
    fn reduced_search_matches_unreduced_genus_two(a in genus_two()) {
        let cfg = DecompositionConfig { n_max: 1, coeff_bound: 1, basis_depth: 0, budget: u64::MAX };
        let found = decomposition_search(&a, &cfg).unwrap();
        let naive = unit_monomial_by_evaluation(a.entries()) || naive_rank_one(&a, 1);
        prop_assert_eq!(found.is_some(), naive);
    }

    #[test]
    fn genus_one_bound_is_verified(a in genus_one()) {
        match genus_one_top_bound(&a).unwrap() {
            GenusOneBound::Infinite => prop_assert_eq!(a.signature(), 2),
            GenusOneBound::Bound { n, decomposition, .. } => {
                prop_assert!(a.signature() != 2);
                prop_assert!(n <= 4);
                prop_assert_eq!(n, decomposition.n());
                prop_assert!(verify_decomposition(&a, &decomposition).unwrap());
            }
        }
    }

    #[test]
    fn completed_basis_is_unimodular(x in -50i64..50, y in -50i64..50) {
        if num_integer::gcd(x, y) == 1 {
            let (s, t) = complete_basis(x, y).unwrap();
            prop_assert_eq!(x * t - y * s, 1);
        } else {
            prop_assert!(complete_basis(x, y).is_err());
        }
    }

    #[test]
    fn framing_form_is_the_seifert_form(a in genus_one(), x in -20i64..20, y in -20i64..20) {
        let e = a.entries();
        prop_assert_eq!(framing_form(&a, x, y).unwrap(), e[0][0] * x * x + (e[0][1] + e[1][0]) * x * y + e[1][1] * y * y);
    }
}

#[test]
fn budget_is_deterministic() {
    let a = pretzel3_seifert(5, -9, 29).unwrap();
    let tight = DecompositionConfig {
        budget: 1_000,
        ..DecompositionConfig::default()
    };
    let first = decomposition_search(&a, &tight);
    for _ in 0..3 {
        assert_eq!(decomposition_search(&a, &tight), first);
    }
}

#[test]
fn tampered_decompositions_fail() {
    let a = twist_seifert(3).unwrap();
    let GenusOneBound::Bound {
        mut decomposition, ..
    } = genus_one_top_bound(&a).unwrap()
    else {
        panic!("twist knots have signature 0")
    };
    assert!(verify_decomposition(&a, &decomposition).unwrap());
    decomposition.b[0][0] += 1;
    assert!(!verify_decomposition(&a, &decomposition).unwrap());
}
