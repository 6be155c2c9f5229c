use alloc::vec::Vec;
use core::ops::{Add, Neg, Sub};

use num_traits::Zero;

use crate::scalar::Scalar;
use crate::Error;

/// A finitely supported vector `Σ coeff · x_index` with 1-based indices.
///
/// Entries are kept sorted by index with no stored zeros, so the empty list
/// is the zero vector and structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVec<S> {
    entries: Vec<(usize, S)>,
}

impl<S: Scalar> Default for SparseVec<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> SparseVec<S> {
    pub fn zero() -> Self {
        SparseVec { entries: Vec::new() }
    }

    /// The basis vector `x_n`.
    pub fn basis(n: usize) -> Self {
        assert!(n >= 1, "sequence indices are 1-based");
        SparseVec {
            entries: alloc::vec![(n, S::one())],
        }
    }

    /// Builds a vector from arbitrary `(index, coeff)` pairs; duplicates are
    /// summed and zeros dropped.
    pub fn from_pairs<I: IntoIterator<Item = (usize, S)>>(pairs: I) -> Self {
        let mut raw: Vec<(usize, S)> = pairs.into_iter().collect();
        raw.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(usize, S)> = Vec::with_capacity(raw.len());
        for (i, v) in raw {
            assert!(i >= 1, "sequence indices are 1-based");
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc = acc.clone() + v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !v.is_zero());
        SparseVec { entries }
    }

    /// `coeffs[0]` becomes the coefficient of `x_1`.
    pub fn from_dense(coeffs: &[S]) -> Self {
        SparseVec {
            entries: coeffs
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i + 1, v.clone()))
                .collect(),
        }
    }

    /// Dense coordinates `x_1 … x_len`.
    pub fn to_dense(&self, len: usize) -> Vec<S> {
        let mut out = alloc::vec![S::zero(); len];
        for (i, v) in &self.entries {
            if *i <= len {
                out[*i - 1] = v.clone();
            }
        }
        out
    }

    /// The coordinate functional `x_n*(self)`.
    pub fn coeff(&self, n: usize) -> S {
        match self.entries.binary_search_by_key(&n, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn entries(&self) -> &[(usize, S)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, S)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(i, _)| *i)
    }

    /// Smallest index of the support (`p_λ`).
    pub fn min_support(&self) -> Result<usize, Error> {
        self.entries
            .first()
            .map(|(i, _)| *i)
            .ok_or(Error::UndefinedSupportExtremum)
    }

    /// Largest index of the support (`q_y`).
    pub fn max_support(&self) -> Result<usize, Error> {
        self.entries
            .last()
            .map(|(i, _)| *i)
            .ok_or(Error::UndefinedSupportExtremum)
    }

    /// Largest support index, or 0 for the zero vector.
    pub fn degree(&self) -> usize {
        self.entries.last().map_or(0, |(i, _)| *i)
    }

    /// ℓ₁ norm.
    pub fn norm1(&self) -> S::Real {
        self.entries
            .iter()
            .fold(S::Real::zero(), |acc, (_, v)| acc + v.modulus())
    }

    pub fn scaled(&self, t: &S) -> Self {
        if t.is_zero() {
            return Self::zero();
        }
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(i, v)| (*i, t.clone() * v.clone()))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// `self + t·other`, merging the sorted supports.
    pub fn add_scaled(&self, t: &S, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            let next = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => a.next().cloned(),
                (None, Some((j, w))) => {
                    let r = (*j, t.clone() * w.clone());
                    b.next();
                    Some(r)
                }
                (Some((i, v)), Some((j, w))) => {
                    if i < j {
                        a.next().cloned()
                    } else if j < i {
                        let r = (*j, t.clone() * w.clone());
                        b.next();
                        Some(r)
                    } else {
                        let r = (*i, v.clone() + t.clone() * w.clone());
                        a.next();
                        b.next();
                        Some(r)
                    }
                }
            };
            if let Some((i, v)) = next {
                if !v.is_zero() {
                    out.push((i, v));
                }
            }
        }
        SparseVec { entries: out }
    }

    /// Zeroes every coordinate with index below `k0`.
    pub fn truncate_below(&self, k0: usize) -> Self {
        SparseVec {
            entries: self.entries.iter().filter(|(i, _)| *i >= k0).cloned().collect(),
        }
    }

    /// Moves every coordinate `n` to `n + shift`.
    pub fn shifted_up(&self, shift: usize) -> Self {
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (i + shift, v.clone())).collect(),
        }
    }

    /// Maps coefficients, dropping any that become zero.
    pub fn map<T: Scalar, F: Fn(&S) -> T>(&self, f: F) -> SparseVec<T> {
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(i, v)| (*i, f(v)))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }
}

impl<S: Scalar> Add for &SparseVec<S> {
    type Output = SparseVec<S>;
    fn add(self, rhs: &SparseVec<S>) -> SparseVec<S> {
        self.add_scaled(&S::one(), rhs)
    }
}

impl<S: Scalar> Sub for &SparseVec<S> {
    type Output = SparseVec<S>;
    fn sub(self, rhs: &SparseVec<S>) -> SparseVec<S> {
        self.add_scaled(&-S::one(), rhs)
    }
}

impl<S: Scalar> Add for SparseVec<S> {
    type Output = SparseVec<S>;
    fn add(self, rhs: SparseVec<S>) -> SparseVec<S> {
        &self + &rhs
    }
}

impl<S: Scalar> Sub for SparseVec<S> {
    type Output = SparseVec<S>;
    fn sub(self, rhs: SparseVec<S>) -> SparseVec<S> {
        &self - &rhs
    }
}

impl<S: Scalar> Neg for SparseVec<S> {
    type Output = SparseVec<S>;
    fn neg(self) -> SparseVec<S> {
        SparseVec {
            entries: self.entries.into_iter().map(|(i, v)| (i, -v)).collect(),
        }
    }
}
