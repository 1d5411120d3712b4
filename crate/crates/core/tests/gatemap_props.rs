mod common;

use proptest::prelude::*;
use psgate_core::gatemap::{self, COMPUTATIONAL_PAIRS};
use psgate_core::linalg::{self, c};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn entrywise_equals_block(seed in any::<u64>()) {
        let u = linalg::random_matrix(4, 4, &mut common::rng(seed));
        let a = gatemap::f_entrywise(&u).unwrap();
        let b = gatemap::f_block(&u).unwrap();
        prop_assert!(linalg::max_abs_diff(&a, &b) < 1e-13 * linalg::max_abs(&a).max(1.0));
    }

    #[test]
    fn homogeneous_of_degree_two(seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let u = linalg::random_matrix(4, 4, &mut common::rng(seed));
        let s = c(re, im);
        let lhs = gatemap::f(&(&u * s));
        let rhs = gatemap::f(&u) * (s * s);
        prop_assert!(linalg::max_abs_diff(&lhs, &rhs) < 1e-12 * linalg::max_abs(&rhs).max(1.0));
    }

    #[test]
    fn swap_relation(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let p = linalg::random_matrix(2, 2, &mut rng);
        let q = linalg::random_matrix(2, 2, &mut rng);
        let s = linalg::swap_operator();
        let lhs = q.kronecker(&p) * &s;
        let rhs = &s * p.kronecker(&q);
        prop_assert!(linalg::max_abs_diff(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn simulator_matches_permanent_oracle_and_formula(seed in any::<u64>(), n in 4usize..=8) {
        let u = linalg::haar_unitary(n, &mut common::rng(seed));
        let t = gatemap::transfer_matrix(&u).unwrap();
        let corner = u.view((0, 0), (4, 4)).into_owned();
        prop_assert!(linalg::max_abs_diff(&t.block, &gatemap::f(&corner)) < 1e-10);
        prop_assert!(linalg::max_abs_diff(&t.block, &common::block_oracle(&u)) < 1e-12);
    }

    #[test]
    fn evolution_preserves_norm(seed in any::<u64>(), n in 2usize..=12, a in 0usize..12, b in 0usize..12) {
        prop_assume!(a != b && a < n && b < n);
        let u = linalg::haar_unitary(n, &mut common::rng(seed));
        let out = gatemap::evolve_two_photons(&u, (a, b)).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
        for (&(k, l), amp) in &out.amplitudes {
            prop_assert!((amp - common::fock_amplitude(&u, (a, b), (k, l))).norm() < 1e-12);
        }
    }
}

#[test]
fn success_probabilities_sum_columns() {
    let u = linalg::haar_unitary(8, &mut common::rng(3));
    let t = gatemap::transfer_matrix(&u).unwrap();
    for (col, p) in t.success_probabilities.iter().enumerate() {
        let column: f64 = (0..4).map(|r| t.block[(r, col)].norm_sqr()).sum();
        assert!((column - p).abs() < 1e-14);
    }
    assert_eq!(COMPUTATIONAL_PAIRS.len(), 4);
}

#[test]
fn simulator_rejects_non_unitary() {
    let m = linalg::identity(4) * c(0.5, 0.0);
    assert!(gatemap::evolve_two_photons(&m, (0, 2)).is_err());
}
