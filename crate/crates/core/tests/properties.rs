use itertools::Itertools;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use permlab::lihwang::{f6_poly, gap_direct, interpolation_nodes, quartic_corrected, roots_in_open_unit};
use permlab::matcore::{
    average_lines, is_doubly_stochastic, random_birkhoff, random_birkhoff_exact, random_simplex_weights, seeded_rng,
    sinkhorn_project, sum_vectors, SINKHORN_MAX_ITERS, SINKHORN_TOL,
};
use permlab::perm::{laplace_expand, per_naive, per_ryser, s_k_mixed, sigma_k};
use permlab::poly::{sturm_sequence, Poly};
use permlab::scalar::{binomial, factorial, rat};
use permlab::symf::{elem_sym, em_identity_residuals, per_incl_excl, t_family};
use permlab::{Axis, Mat, Rational, Scalar, SubsetIndex};

fn cfg(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=7).prop_map(|(p, q)| rat(p, q))
}

fn rational_matrix(n: usize) -> impl Strategy<Value = Mat<Rational>> {
    prop::collection::vec(rational(), n * n).prop_map(move |e| Mat::signed(n, e).unwrap())
}

fn sized_matrix(lo: usize, hi: usize) -> impl Strategy<Value = Mat<Rational>> {
    (lo..=hi).prop_flat_map(rational_matrix)
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn subset_elem_sym(x: &[Rational], r: usize) -> Rational {
    x.iter()
        .combinations(r)
        .map(|c| c.into_iter().cloned().product::<Rational>())
        .sum()
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn three_permanent_algorithms_agree(a in sized_matrix(1, 6), row in 0usize..6) {
        let n = a.order();
        let naive = per_naive(&a);
        prop_assert_eq!(&per_ryser(&a), &naive);
        prop_assert_eq!(&per_incl_excl(&a), &naive);
        let rows = SubsetIndex::new(vec![row % n], n).unwrap();
        prop_assert_eq!(&laplace_expand(&a, &rows).unwrap(), &naive);
        if n >= 3 {
            let rows = SubsetIndex::new(vec![0, n - 1], n).unwrap();
            prop_assert_eq!(&laplace_expand(&a, &rows).unwrap(), &naive);
        }
    }

    #[test]
    fn permanent_ignores_row_and_column_order(
        (a, rp, cp) in (2usize..=6).prop_flat_map(|n| (rational_matrix(n), permutation(n), permutation(n)))
    ) {
        prop_assert_eq!(per_ryser(&a.permuted(&rp, &cp)), per_ryser(&a));
        prop_assert_eq!(per_ryser(&a.transpose()), per_ryser(&a));
    }

    #[test]
    fn permanent_is_linear_in_each_row(
        (a, u, v, i) in (2usize..=5).prop_flat_map(|n| (
            rational_matrix(n),
            prop::collection::vec(rational(), n),
            prop::collection::vec(rational(), n),
            0..n,
        ))
    ) {
        let with_row = |r: &[Rational]| {
            let mut m = a.clone();
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone());
            }
            per_ryser(&m)
        };
        let sum: Vec<Rational> = u.iter().zip(&v).map(|(x, y)| x + y).collect();
        prop_assert_eq!(with_row(&sum), with_row(&u) + with_row(&v));
    }

    #[test]
    fn mixed_sums_add_up_to_permanent_of_sum(
        (a, b) in (1usize..=5).prop_flat_map(|n| (rational_matrix(n), rational_matrix(n)))
    ) {
        let n = a.order();
        let total: Rational = (0..=n).map(|k| s_k_mixed(&a, &b, k).unwrap()).sum();
        prop_assert_eq!(total, per_naive(&a.add(&b)));
    }

    #[test]
    fn elem_sym_matches_subset_enumeration(x in prop::collection::vec(rational(), 0..=8)) {
        for r in 0..=x.len() + 1 {
            prop_assert_eq!(elem_sym(&x, r), subset_elem_sym(&x, r), "r = {}", r);
        }
    }

    #[test]
    fn full_column_family_has_unit_top_sum(n in 2usize..=6, seed in any::<u64>()) {
        let a = random_birkhoff_exact(n, 3, 6, seed).unwrap();
        prop_assert_eq!(t_family(&a, n).unwrap().sum_elem_sym(n), rat(1, 1));
    }

    #[test]
    fn order4_identities_hold_exactly_on_doubly_stochastic(seed in any::<u64>()) {
        let a = random_birkhoff_exact(4, 5, 8, seed).unwrap();
        let (r1, r2) = em_identity_residuals(&a).unwrap();
        prop_assert_eq!(r1, rat(0, 1));
        prop_assert_eq!(r2, rat(0, 1));
    }

    #[test]
    fn corrected_quartic_matches_gap_at_quarter_nodes(seed in any::<u64>()) {
        let a = random_birkhoff_exact(4, 6, 10, seed).unwrap();
        let q = quartic_corrected(&a).unwrap();
        for k in 0..=4 {
            let t = rat(k, 4);
            prop_assert_eq!(q.eval(&t), rat(32, 1) * gap_direct(&a, &t).unwrap());
        }
        // The interpolation nodes are disjoint from the checked quarters.
        let quarters: Vec<Rational> = (0..=4).map(|k| rat(k, 4)).collect();
        prop_assert!(interpolation_nodes::<Rational>().iter().all(|x| !quarters.contains(x)));
    }

    #[test]
    fn order6_gap_factors_exactly(seed in any::<u64>()) {
        let a = random_birkhoff_exact(6, 4, 6, seed).unwrap();
        let f = f6_poly(&a).unwrap();
        for k in 0..=6 {
            let t = rat(k, 6);
            let rhs = t.clone() * (rat(1, 1) - t.clone()) * f.eval(&t);
            prop_assert_eq!(gap_direct(&a, &t).unwrap(), rhs);
        }
    }

    #[test]
    fn average_lines_keeps_totals(
        (a, s, t) in (2usize..=5).prop_flat_map(|n| (rational_matrix(n), 0..n, 0..n)).prop_filter("distinct", |(_, s, t)| s != t)
    ) {
        let r = average_lines(&a, Axis::Row, s, t).unwrap();
        prop_assert_eq!(r.entry_sum(), a.entry_sum());
        prop_assert_eq!(sum_vectors(&r).cols, sum_vectors(&a).cols);
        let c = average_lines(&a, Axis::Col, s, t).unwrap();
        prop_assert_eq!(sum_vectors(&c).rows, sum_vectors(&a).rows);
    }
}

proptest! {
    #![proptest_config(cfg(1000))]

    #[test]
    fn sinkhorn_output_is_doubly_stochastic(n in 2usize..=6, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let w = random_simplex_weights(n * n, &mut rng);
        let a = Mat::from_entries(n, w.into_iter().map(|x| x + 1e-3).collect()).unwrap();
        let b = sinkhorn_project(&a, SINKHORN_TOL, SINKHORN_MAX_ITERS).unwrap();
        prop_assert!(is_doubly_stochastic(&b, &1e-12));
    }

    #[test]
    fn birkhoff_samples_are_doubly_stochastic(n in 1usize..=6, m in 1usize..=12, seed in any::<u64>()) {
        let a = random_birkhoff(n, m, seed).unwrap();
        prop_assert!(is_doubly_stochastic(&a, &1e-12));
        let w = random_simplex_weights(m, &mut seeded_rng(seed));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn sturm_root_search_agrees_with_sign_scan(
        coeffs in prop::collection::vec(-20i64..=20, 4..=5).prop_filter("leading", |c| *c.last().unwrap() != 0)
    ) {
        let p: Poly<Rational> = Poly::new(coeffs.iter().map(|&c| rat(c, 1)).collect());
        // Restrict to squarefree polynomials, where every root in (0,1) changes sign.
        let seq = sturm_sequence(&p);
        prop_assume!(seq.last().unwrap().degree() == Some(0));
        let pf = p.to_f64();
        let steps = 1_000_000usize;
        let mut prev = pf.eval(&1e-6);
        let mut scan = prev == 0.0;
        for k in 2..steps {
            let x = k as f64 * 1e-6;
            let v = pf.eval(&x);
            if v == 0.0 || v.signum() != prev.signum() {
                scan = true;
                break;
            }
            prev = v;
        }
        let found = roots_in_open_unit(&p, 1e-12);
        prop_assert_eq!(found.is_some(), scan, "{:?}", coeffs);
        if let Some((lo, hi)) = found {
            let a = pf.eval(&lo.max(0.0));
            let b = pf.eval(&hi.min(1.0));
            prop_assert!(a == 0.0 || b == 0.0 || a.signum() != b.signum() || hi - lo < 3e-12);
        }
    }
}

#[test]
fn sigma_k_of_uniform_matches_closed_form() {
    for n in 1..=6usize {
        let j = Mat::<Rational>::uniform(n);
        for k in 0..=n {
            let c: Rational = binomial(n, k);
            let expected = c.clone() * c * factorial::<Rational>(k) / Rational::from_usize(n).powu(k as u32);
            assert_eq!(sigma_k(&j, k).unwrap(), expected, "n={n} k={k}");
        }
    }
}

#[test]
fn order4_identities_fail_off_the_polytope() {
    let mut nonzero = 0;
    for seed in 0..20u64 {
        let a = random_birkhoff_exact(4, 5, 8, seed).unwrap();
        let mut b = a.clone();
        b.set(0, 0, a.get(0, 0) + rat(1, 3));
        let (r1, r2) = em_identity_residuals(&b).unwrap();
        if r1 != rat(0, 1) || r2 != rat(0, 1) {
            nonzero += 1;
        }
    }
    assert_eq!(nonzero, 20);
}
