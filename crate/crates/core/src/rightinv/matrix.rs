use alloc::vec::Vec;

use num_traits::Zero;

use crate::scalar::Scalar;
use crate::shift::OperatorSeries;
use crate::Error;

/// Largest dimension accepted by [`TriMatrix::inverse_by_cofactors`].
pub const ORACLE_MAX_DIM: usize = 8;

/// The upper-triangular system matrix of the right inverse on `X_d`:
/// `M[n,k] = λ_{p+k−n} ∏_{i=n}^{p+k−1} w_i` for `n ≤ k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriMatrix<S> {
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> TriMatrix<S> {
    pub fn build(series: &OperatorSeries<S>, d: usize) -> Result<Self, Error> {
        let p = series.min_power().map_err(|_| Error::NullLambda)?;
        let w = series.weights();
        let rows = (1..=d)
            .map(|n| {
                (1..=d)
                    .map(|k| {
                        if k < n {
                            return S::zero();
                        }
                        let lam = series.coefficient(p + k - n);
                        if lam.is_zero() {
                            lam
                        } else {
                            lam * S::from_real(w.product(n, p + k - 1))
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(TriMatrix { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// `M[n,k]`, 1-based.
    pub fn entry(&self, n: usize, k: usize) -> &S {
        &self.rows[n - 1][k - 1]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, row)| row[..i].iter().all(Zero::is_zero))
    }

    /// `det M = ∏ M[i,i]`.
    pub fn det(&self) -> S {
        self.rows
            .iter()
            .enumerate()
            .fold(S::one(), |acc, (i, row)| acc * row[i].clone())
    }

    /// `M · v` for a dense column.
    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// `M⁻¹` entrywise from `(−1)^{n+k} det(M̂_{kn}) / det M`, each minor
    /// expanded over permutations.
    pub fn inverse_by_cofactors(&self) -> Result<Vec<Vec<S>>, Error> {
        let d = self.dim();
        if d > ORACLE_MAX_DIM {
            return Err(Error::OracleSizeLimit {
                dim: d,
                max: ORACLE_MAX_DIM,
            });
        }
        let det = permutation_det(&self.rows);
        let mut inv = alloc::vec![alloc::vec![S::zero(); d]; d];
        for (n, inv_row) in inv.iter_mut().enumerate() {
            for (k, slot) in inv_row.iter_mut().enumerate() {
                let minor = minor(&self.rows, k, n);
                let cof = permutation_det(&minor);
                let signed = if (n + k) % 2 == 0 { cof } else { -cof };
                *slot = signed / det.clone();
            }
        }
        Ok(inv)
    }
}

/// The matrix with row `row` and column `col` removed (0-based).
pub fn minor<S: Clone>(a: &[Vec<S>], row: usize, col: usize) -> Vec<Vec<S>> {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect()
}

/// `Σ_σ sgn(σ) ∏_ℓ a[σ(ℓ)][ℓ]` over all permutations; branches that pick
/// a zero entry are skipped since their products vanish.
pub fn permutation_det<S: Scalar>(a: &[Vec<S>]) -> S {
    fn walk<S: Scalar>(a: &[Vec<S>], col: usize, used: &mut [bool], prod: S, odd: bool, acc: &mut S) {
        let n = a.len();
        if col == n {
            *acc = core::mem::replace(acc, S::zero()) + if odd { -prod } else { prod };
            return;
        }
        for row in 0..n {
            if used[row] || a[row][col].is_zero() {
                continue;
            }
            // rows already placed above this one each form an inversion
            let inversions = used[row + 1..].iter().filter(|u| **u).count();
            used[row] = true;
            let next = prod.clone() * a[row][col].clone();
            walk(a, col + 1, used, next, odd ^ (inversions % 2 == 1), acc);
            used[row] = false;
        }
    }

    let mut acc = S::zero();
    let mut used = alloc::vec![false; a.len()];
    walk(a, 0, &mut used, S::one(), false, &mut acc);
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rational, RealScalar};
    use crate::space::{SparseVec, WeightSeq};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn series() -> OperatorSeries<Rational> {
        OperatorSeries::new(
            SparseVec::from_dense(&[q(1, 1), q(1, 2)]),
            WeightSeq::geometric(q(1, 2), q(1, 2)).unwrap(),
        )
    }

    #[test]
    fn small_system_entries() {
        let m = TriMatrix::build(&series(), 2).unwrap();
        assert_eq!(m.entry(1, 1), &q(1, 4));
        assert_eq!(m.entry(1, 2), &q(1, 64));
        assert_eq!(m.entry(2, 2), &q(1, 8));
        assert_eq!(m.entry(2, 1), &q(0, 1));
        assert_eq!(m.det(), q(1, 32));
    }

    #[test]
    fn unweighted_unit_lambda_is_identity() {
        let b = OperatorSeries::new(SparseVec::from_dense(&[q(1, 1)]), WeightSeq::constant_one());
        let m = TriMatrix::build(&b, 5).unwrap();
        for n in 1..=5 {
            for k in 1..=5 {
                assert_eq!(m.entry(n, k), &q(i64::from(n == k), 1));
            }
        }
        let inv = m.inverse_by_cofactors().unwrap();
        assert_eq!(inv, m.rows().to_vec());
    }

    #[test]
    fn cofactor_inverse_small() {
        let inv = TriMatrix::build(&series(), 2).unwrap().inverse_by_cofactors().unwrap();
        assert_eq!(inv[0][0], q(4, 1));
        assert_eq!(inv[0][1], q(-1, 2));
        assert_eq!(inv[1][1], q(8, 1));
        assert_eq!(inv[1][0], q(0, 1));
    }

    #[test]
    fn null_lambda_and_size_cap() {
        let z = OperatorSeries::new(SparseVec::<Rational>::zero(), WeightSeq::constant_one());
        assert_eq!(TriMatrix::build(&z, 3), Err(Error::NullLambda));
        let big = TriMatrix::build(&series(), 9).unwrap();
        assert_eq!(
            big.inverse_by_cofactors(),
            Err(Error::OracleSizeLimit { dim: 9, max: 8 })
        );
    }

    #[test]
    fn permutation_det_of_dense_matrix() {
        // det [[2,1,0],[1,3,1],[0,1,4]] = 2(12-1) - 1(4-0) = 18
        let a = alloc::vec![
            alloc::vec![q(2, 1), q(1, 1), q(0, 1)],
            alloc::vec![q(1, 1), q(3, 1), q(1, 1)],
            alloc::vec![q(0, 1), q(1, 1), q(4, 1)],
        ];
        assert_eq!(permutation_det(&a), q(18, 1));
        // swapping two rows flips the sign
        let b = alloc::vec![a[1].clone(), a[0].clone(), a[2].clone()];
        assert_eq!(permutation_det(&b), q(-18, 1));
        assert_eq!(permutation_det::<Rational>(&[]), q(1, 1));
    }
}
