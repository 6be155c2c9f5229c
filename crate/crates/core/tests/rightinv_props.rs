mod common;

use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use supercyc_core::rightinv::{
    apply_s_lambda_pow, eval_f, eval_g, inverse_entry_log_bound, iterate_dimension, permutation_det,
    solve_right_inverse, TriMatrix,
};
use supercyc_core::{LinearMap, OperatorSeries, Rational, RealScalar, Scalar, SparseVec, WeightSeq};

/// `a ≤ b` for logarithms, allowing for rounding in the float logs.
fn log_le(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * b.abs().max(1.0)
}

/// Normwise backward-error bound for triangular back-substitution plus
/// the float evaluation of `T b`: `4·d·ε·‖λ‖₁·‖b‖₁`.
fn backward_bound(t: &OperatorSeries<f64>, d: usize, b: &SparseVec<f64>) -> f64 {
    4.0 * d as f64 * f64::EPSILON * t.l1_norm() * b.norm1()
}

fn y_in(d: usize) -> impl Strategy<Value = SparseVec<Rational>> {
    sparse(d, d.min(5))
}

fn instance() -> impl Strategy<Value = (SparseVec<Rational>, WeightSeq<Rational>, usize, SparseVec<Rational>)> {
    (nonzero_sparse(6, 4), weights(), 1usize..=10)
        .prop_flat_map(|(lam, w, d)| (Just(lam), Just(w), Just(d), y_in(d)))
}

fn small_instance(max_d: usize) -> impl Strategy<Value = (SparseVec<Rational>, WeightSeq<Rational>, usize, SparseVec<Rational>)> {
    (nonzero_sparse(6, 4), weights(), 1usize..=max_d)
        .prop_flat_map(|(lam, w, d)| (Just(lam), Just(w), Just(d), y_in(d)))
}

#[test]
fn matrix_entries_match_naive_products() {
    let lam = SparseVec::from_pairs([(2, q(1, 3)), (3, q(-1, 1)), (5, q(2, 1))]);
    let w = WeightSeq::geometric(q(1, 3), q(1, 2)).unwrap();
    let m = TriMatrix::build(&OperatorSeries::new(lam.clone(), w.clone()), 7).unwrap();
    assert_eq!(m.rows().to_vec(), naive_system_matrix(&lam, &w, 7));
    assert!(m.is_upper_triangular());
}

#[test]
fn ill_conditioned_float_residual_exceeds_relative_tolerance() {
    // |λ₃/λ₂| = 8.4 makes the solution grow like 8.4⁹ over y; the residual
    // stays within the backward-error bound but not within 1e-9·‖y‖.
    let lam = SparseVec::from_pairs([(2, 1.0 / 7.0), (3, -6.0 / 5.0), (6, 9.0)]);
    let t = OperatorSeries::new(lam, WeightSeq::constant_one());
    let y = SparseVec::from_pairs([(5, -2.0), (6, -4.0), (9, 5.0 / 3.0)]);
    let s = solve_right_inverse(&t, 9, &y).unwrap();
    let residual = (&t.apply(&s) - &y).norm1();
    assert!(s.norm1() > 1e7 * y.norm1());
    assert!(residual > 1e-9 * y.norm1());
    assert!(residual <= backward_bound(&t, 9, &s));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn right_inverse_identity((lam, w, d, y) in instance()) {
        let t = OperatorSeries::new(lam, w);
        let s = solve_right_inverse(&t, d, &y).unwrap();
        prop_assert_eq!(t.apply(&s), y);
    }

    #[test]
    fn right_inverse_identity_in_float((lam, w, d, y) in instance()) {
        let Some(wf) = float_weights(&w) else { return Ok(()); };
        let t = OperatorSeries::new(to_float(&lam), wf);
        let yf = to_float(&y);
        let s = solve_right_inverse(&t, d, &yf).unwrap();
        let residual = (&t.apply(&s) - &yf).norm1();
        prop_assert!(residual <= backward_bound(&t, d, &s), "residual {residual}");
    }

    #[test]
    fn solution_norm_obeys_f_bound((lam, w, d, y) in instance()) {
        prop_assume!(!y.is_zero());
        let t = OperatorSeries::new(lam, w);
        let s = solve_right_inverse(&t, d, &y).unwrap();
        let f = eval_f(&t, 1.0, d).unwrap();
        prop_assert!(log_le(s.norm1().ln_abs(), f.log_value + y.norm1().ln_abs()));
    }

    #[test]
    fn support_law((lam, w, d, y) in instance()) {
        prop_assume!(!y.is_zero());
        let p = lam.min_support().unwrap();
        let t = OperatorSeries::new(lam, w);
        let s = solve_right_inverse(&t, d, &y).unwrap();
        prop_assert_eq!(s.max_support().unwrap(), p + y.max_support().unwrap());
        prop_assert!(s.min_support().unwrap() > p);
        prop_assert!(s.max_support().unwrap() <= p + d);
    }

    #[test]
    fn back_substitution_equals_cofactor_inverse((lam, w, d, y) in small_instance(7)) {
        let p = lam.min_support().unwrap();
        let t = OperatorSeries::new(lam, w);
        let m = TriMatrix::build(&t, d).unwrap();
        let inv = m.inverse_by_cofactors().unwrap();
        let a = y.to_dense(d);
        let b: Vec<Rational> = inv
            .iter()
            .map(|row| row.iter().zip(&a).fold(Rational::zero(), |acc, (u, v)| acc + u * v))
            .collect();
        prop_assert_eq!(solve_right_inverse(&t, d, &y).unwrap(), SparseVec::from_dense(&b).shifted_up(p));
        // M · M⁻¹ = I
        for (k, _) in inv.iter().enumerate() {
            let col: Vec<Rational> = inv.iter().map(|row| row[k].clone()).collect();
            let prod = m.mul_vec(&col);
            for (n, v) in prod.iter().enumerate() {
                prop_assert_eq!(v.clone(), if n == k { Rational::one() } else { Rational::zero() });
            }
        }
    }

    #[test]
    fn inverse_entries_obey_bound((lam, w, d, _y) in small_instance(7)) {
        let t = OperatorSeries::new(lam, w);
        let inv = TriMatrix::build(&t, d).unwrap().inverse_by_cofactors().unwrap();
        let bound = inverse_entry_log_bound(&t, d).unwrap();
        for row in &inv {
            for v in row {
                prop_assert!(v.is_zero() || log_le(v.ln_abs(), bound), "{} > {}", v.ln_abs(), bound);
            }
        }
    }

    #[test]
    fn determinant_identities(lam in nonzero_sparse(6, 4), w in weights(), d in 1usize..=6) {
        let p = lam.min_support().unwrap();
        let m = TriMatrix::build(&OperatorSeries::new(lam.clone(), w.clone()), d).unwrap();
        let mut closed = lam.coeff(p).powu(d as u64);
        for j in 1..=d {
            for i in j..=p + j - 1 {
                closed *= weight_naive(&w, i);
            }
        }
        prop_assert_eq!(m.det(), closed.clone());
        prop_assert_eq!(permutation_det(m.rows()), closed);
    }

    #[test]
    fn iterated_inverse(lam in nonzero_sparse(5, 3), w in weights(), y in nonzero_sparse(6, 3), k in 1usize..=5) {
        let p = lam.min_support().unwrap();
        let t = OperatorSeries::new(lam, w);
        let s = apply_s_lambda_pow(&t, &y, k).unwrap();
        prop_assert_eq!(t.apply_pow(&s, k), y.clone());
        let dk = iterate_dimension(p, y.max_support().unwrap(), k);
        let f = eval_f(&t, 1.0, dk).unwrap();
        prop_assert!(log_le(s.norm1().ln_abs(), k as f64 * f.log_value + y.norm1().ln_abs()));
    }

    #[test]
    fn f_and_g_are_monotone(lam in nonzero_sparse(6, 4), w in weights(), c_x in 1.0f64..3.0) {
        let t = OperatorSeries::new(lam.clone(), w.clone());
        let p = lam.min_support().unwrap();
        let sups: Vec<Rational> = (p..=lam.degree()).map(|k| lam.coeff(k).modulus()).collect();
        let delta = sups[0].clone();
        for d in 1..30 {
            let f0 = eval_f(&t, c_x, d).unwrap().log_value;
            let f1 = eval_f(&t, c_x, d + 1).unwrap().log_value;
            prop_assert!(f0 <= f1);
            let g0 = eval_g(&sups, p, &delta, &w, c_x, d).unwrap().log_value;
            let g1 = eval_g(&sups, p, &delta, &w, c_x, d + 1).unwrap().log_value;
            prop_assert!(g0 <= g1);
        }
    }
}
