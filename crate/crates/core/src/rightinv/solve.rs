use alloc::vec::Vec;

use crate::scalar::Scalar;
use crate::shift::OperatorSeries;
use crate::space::SparseVec;
use crate::Error;

/// `S_{λ,d}(y)`: the unique `b ∈ X_{[p+1, p+d]}` with `T_λ b = y`.
///
/// Back-substitution on the upper-triangular system. Because `M` is upper
/// triangular and `a_n = 0` above `q_y`, only the leading `q_y × q_y` block
/// is touched and the result lives in `X_{[p+1, p+q_y]}`.
pub fn solve_right_inverse<S: Scalar>(
    series: &OperatorSeries<S>,
    d: usize,
    y: &SparseVec<S>,
) -> Result<SparseVec<S>, Error> {
    let p = series.min_power().map_err(|_| Error::NullLambda)?;
    let q = y.degree();
    if q > d {
        return Err(Error::SupportExceedsDimension { support: q, dim: d });
    }
    if q == 0 {
        return Ok(SparseVec::zero());
    }
    let w = series.weights();
    // offsets j = k − n with λ_{p+j} ≠ 0
    let offsets: Vec<(usize, S)> = series
        .coefficients_below(p + q)
        .into_iter()
        .map(|(k, v)| (k - p, v))
        .collect();
    let lead = series.coefficient(p);

    let a = y.to_dense(q);
    let mut b: Vec<S> = alloc::vec![S::zero(); q];
    for n in (1..=q).rev() {
        let mut rhs = a[n - 1].clone();
        for (j, lam) in offsets.iter().filter(|(j, _)| *j > 0) {
            let k = n + j;
            if k > q || b[k - 1].is_zero() {
                continue;
            }
            let m_nk = lam.clone() * S::from_real(w.product(n, p + k - 1));
            rhs = rhs - m_nk * b[k - 1].clone();
        }
        if !rhs.is_zero() {
            let m_nn = lead.clone() * S::from_real(w.product(n, p + n - 1));
            b[n - 1] = rhs / m_nn;
        }
    }
    Ok(SparseVec::from_dense(&b).shifted_up(p))
}

/// `d_ℓ^y = (ℓ − 1)·p + q_y`.
pub fn iterate_dimension(p: usize, q: usize, ell: usize) -> usize {
    (ell - 1) * p + q
}

/// `S_λᵏ(y)` with `S_λ(z) = S_{λ, q_z}(z)` and `S_λ(0) = 0`.
pub fn apply_s_lambda_pow<S: Scalar>(
    series: &OperatorSeries<S>,
    y: &SparseVec<S>,
    k: usize,
) -> Result<SparseVec<S>, Error> {
    series.min_power().map_err(|_| Error::NullLambda)?;
    let mut z = y.clone();
    for _ in 0..k {
        if z.is_zero() {
            break;
        }
        z = solve_right_inverse(series, z.degree(), &z)?;
    }
    Ok(z)
}
