mod common;

use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use supercyc_core::{BiorthSystem, Error, LogMagnitude, Rational, RealScalar, Scalar, SparseVec, WeightSeq};

#[test]
fn basis_vectors_are_biorthogonal() {
    let sys = BiorthSystem::canonical();
    for n in 1..=64 {
        let x: SparseVec<Rational> = sys.vector(n);
        assert_eq!(x.norm1(), Rational::one());
        for m in 1..=64 {
            let expect = if m == n { Rational::one() } else { Rational::zero() };
            assert_eq!(x.coeff(m), expect);
            assert_eq!(sys.functional(m, &x), expect);
        }
    }
}

#[test]
fn support_extrema() {
    let v = SparseVec::from_pairs([(1, q(0, 1)), (2, q(3, 1)), (5, q(1, 1))]);
    assert_eq!(v.min_support(), Ok(2));
    assert_eq!(v.max_support(), Ok(5));
    assert_eq!(e(7).min_support(), Ok(7));
    assert_eq!(e(7).max_support(), Ok(7));
    assert_eq!(SparseVec::<Rational>::zero().min_support(), Err(Error::UndefinedSupportExtremum));
    let v = &e(1).scaled(&q(2, 1)) + &e(4).scaled(&q(5, 1));
    assert_eq!(v.coeff(4), q(5, 1));
}

#[test]
fn geometric_weights_reject_inadmissible_parameters() {
    assert!(WeightSeq::geometric(q(1, 1), q(1, 2)).is_ok());
    assert!(WeightSeq::geometric(q(3, 2), q(1, 2)).is_err());
    assert!(WeightSeq::geometric(q(1, 2), q(1, 1)).is_err());
    assert!(WeightSeq::geometric(q(0, 1), q(1, 2)).is_err());
}

#[test]
fn geometric_tail_identity_up_to_100() {
    for w in [
        WeightSeq::geometric(q(1, 2), q(1, 2)).unwrap(),
        WeightSeq::geometric(q(1, 3), q(3, 4)).unwrap(),
        WeightSeq::geometric(q(2, 1), q(1, 3)).unwrap(),
    ] {
        let total = w.total_sum().unwrap();
        let mut partial = Rational::zero();
        for n in 1..=100 {
            partial += weight_naive(&w, n);
            assert_eq!(w.tail_sum(n).unwrap() + partial.clone(), total);
            assert!(w.weight(n + 1) < w.weight(n));
        }
    }
}

#[test]
fn log_magnitude_is_multiplicative() {
    let a = LogMagnitude::from_f64(-3.5);
    let b = LogMagnitude::from_f64(0.25);
    let p = a * b;
    assert_eq!(p.sign, -1);
    assert!((p.ln_abs - (3.5f64 * 0.25).ln()).abs() < 1e-15);
    let r = q(-7, 3).log_magnitude();
    assert_eq!(r.sign, -1);
    assert!((r.ln_abs - (7.0f64 / 3.0).ln()).abs() < 1e-15);
}

proptest! {
    #[test]
    fn triangle_inequality(x in sparse(12, 6), y in sparse(12, 6), t in rational()) {
        let lhs = x.add_scaled(&t, &y).norm1();
        let combo = &y.scaled(&t) + &x;
        prop_assert_eq!(combo.norm1(), lhs.clone());
        prop_assert!(lhs <= t.modulus() * y.norm1() + x.norm1());
    }

    #[test]
    fn disjoint_supports_give_equality(x in sparse(8, 5), y in sparse(8, 5), t in rational()) {
        let y_far = y.shifted_up(8);
        let lhs = x.scaled(&t).add_scaled(&Rational::one(), &y_far).norm1();
        prop_assert_eq!(lhs, t.modulus() * x.norm1() + y_far.norm1());
    }

    #[test]
    fn stored_entries_are_sorted_and_nonzero(x in sparse(20, 10), y in sparse(20, 10)) {
        for v in [&x + &y, &x - &y, -x.clone()] {
            let idx: Vec<usize> = v.support().collect();
            prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(v.iter().all(|(_, c)| !c.is_zero()));
        }
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn log_weight_product_matches_direct_sum(w in geometric_weights(), a in 1usize..40, len in 0usize..30) {
        let b = a + len;
        let direct: f64 = (a..=b).map(|i| weight_naive(&w, i).to_f64().ln()).sum();
        let exact = w.product(a, b).ln_abs();
        prop_assert!((w.ln_product(a, b) - exact).abs() <= 1e-12);
        prop_assert!((direct - exact).abs() <= 1e-12 * exact.modulus().max(1.0));
        let mut naive = Rational::one();
        for i in a..=b {
            naive *= weight_naive(&w, i);
        }
        prop_assert_eq!(w.product(a, b), naive);
    }

    #[test]
    fn float_and_exact_norms_agree(x in sparse(15, 8)) {
        let exact = x.norm1().to_f64();
        let float = to_float(&x).norm1();
        prop_assert!((exact - float).abs() <= 1e-12 * exact.max(1.0));
    }
}
