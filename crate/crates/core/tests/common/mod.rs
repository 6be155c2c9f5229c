#![allow(dead_code)]

use num_traits::{One, Zero};
use proptest::prelude::*;
use supercyc_core::{Rational, RealScalar, SparseVec, WeightKind, WeightSeq};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

pub fn e(n: usize) -> SparseVec<Rational> {
    SparseVec::basis(n)
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=7).prop_map(|(a, b)| q(a, b))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i64..=9, 1i64..=7, any::<bool>()).prop_map(|(a, b, neg)| q(if neg { -a } else { a }, b))
}

pub fn sparse(max_index: usize, max_nnz: usize) -> impl Strategy<Value = SparseVec<Rational>> {
    prop::collection::vec((1..=max_index, rational()), 0..=max_nnz).prop_map(SparseVec::from_pairs)
}

pub fn nonzero_sparse(max_index: usize, max_nnz: usize) -> impl Strategy<Value = SparseVec<Rational>> {
    (
        (1..=max_index, nonzero_rational()),
        prop::collection::vec((1..=max_index, nonzero_rational()), 0..max_nnz),
    )
        .prop_map(|(head, rest)| {
            // the head index is never repeated, so the vector cannot cancel
            let (h, hv) = head;
            let rest = rest.into_iter().filter(move |(n, _)| *n != h);
            SparseVec::from_pairs(std::iter::once((h, hv)).chain(rest))
        })
}

/// `ConstantOne` or an admissible geometric sequence `c·rⁿ` with
/// `c·r/(1−r) ≤ 1`.
pub fn weights() -> impl Strategy<Value = WeightSeq<Rational>> {
    prop_oneof![
        Just(WeightSeq::constant_one()),
        (prop::sample::select(vec![(1i64, 2i64), (1, 3), (2, 3), (3, 4)]), 1i64..=4).prop_map(|((rn, rd), a)| {
            let r = q(rn, rd);
            let c = (Rational::one() - r.clone()) / r.clone() * q(a, 4);
            WeightSeq::geometric(c, r).unwrap()
        }),
    ]
}

pub fn geometric_weights() -> impl Strategy<Value = WeightSeq<Rational>> {
    weights().prop_filter("geometric only", |w| !w.is_unweighted())
}

/// `w_n` by repeated multiplication, independent of the closed forms.
pub fn weight_naive(w: &WeightSeq<Rational>, n: usize) -> Rational {
    match w.kind() {
        WeightKind::ConstantOne => Rational::one(),
        WeightKind::Geometric { c, r } => {
            let mut v = c.clone();
            for _ in 0..n {
                v *= r;
            }
            v
        }
    }
}

/// One step of the weighted backward shift on a dense vector (0-based
/// storage of coordinates 1..=len).
pub fn dense_shift(w: &WeightSeq<Rational>, x: &[Rational]) -> Vec<Rational> {
    (0..x.len())
        .map(|i| {
            if i + 1 < x.len() {
                weight_naive(w, i + 1) * x[i + 1].clone()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

/// `Σ_k λ_k B_wᵏ x` computed by repeated single dense shifts.
pub fn dense_series(lambda: &SparseVec<Rational>, w: &WeightSeq<Rational>, x: &SparseVec<Rational>) -> SparseVec<Rational> {
    let len = x.degree();
    let mut out = vec![Rational::zero(); len];
    let mut cur = x.to_dense(len);
    for k in 1..=lambda.degree() {
        cur = dense_shift(w, &cur);
        let lam = lambda.coeff(k);
        if !lam.is_zero() {
            for (o, c) in out.iter_mut().zip(&cur) {
                *o += lam.clone() * c.clone();
            }
        }
    }
    SparseVec::from_dense(&out)
}

/// Dense `d × d` system matrix built entry by entry from naive weights.
pub fn naive_system_matrix(lambda: &SparseVec<Rational>, w: &WeightSeq<Rational>, d: usize) -> Vec<Vec<Rational>> {
    let p = lambda.min_support().unwrap();
    (1..=d)
        .map(|n| {
            (1..=d)
                .map(|k| {
                    if k < n {
                        return Rational::zero();
                    }
                    let mut v = lambda.coeff(p + k - n);
                    for i in n..=p + k - 1 {
                        v *= weight_naive(w, i);
                    }
                    v
                })
                .collect()
        })
        .collect()
}

/// The same weight family in floating point; `None` when rounding pushes
/// a boundary-admissible sequence past the summability limit.
pub fn float_weights(w: &WeightSeq<Rational>) -> Option<WeightSeq<f64>> {
    match w.kind() {
        WeightKind::ConstantOne => Some(WeightSeq::constant_one()),
        WeightKind::Geometric { c, r } => WeightSeq::geometric(c.to_f64(), r.to_f64()).ok(),
    }
}

pub fn to_float(x: &SparseVec<Rational>) -> SparseVec<f64> {
    x.map(|v| v.to_f64())
}
