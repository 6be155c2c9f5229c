//! Weighted backward shifts and the operator series `T_λ = Σ_k λ_k B_wᵏ`.
//!
//! On finitely supported vectors every series acts exactly: `B_wᵏ x = 0`
//! as soon as `k ≥ maxSupport(x)`, so only finitely many powers contribute.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::scalar::{RealScalar, Scalar};
use crate::space::{SparseVec, WeightSeq};
use crate::Error;

/// A linear map acting on finitely supported vectors.
pub trait LinearMap<S: Scalar> {
    fn apply(&self, x: &SparseVec<S>) -> SparseVec<S>;

    fn apply_pow(&self, x: &SparseVec<S>, k: usize) -> SparseVec<S> {
        let mut out = x.clone();
        for _ in 0..k {
            if out.is_zero() {
                break;
            }
            out = self.apply(&out);
        }
        out
    }
}

/// `B_w x = Σ_n x_{n+1}*(x) · w_n · x_n`.
pub fn apply_shift<S: Scalar>(w: &WeightSeq<S::Real>, x: &SparseVec<S>) -> SparseVec<S> {
    apply_shift_pow(w, x, 1)
}

/// `B_wᵏ x`; coordinate `n` moves to `n − k` picking up `∏_{i=n−k}^{n−1} w_i`.
pub fn apply_shift_pow<S: Scalar>(w: &WeightSeq<S::Real>, x: &SparseVec<S>, k: usize) -> SparseVec<S> {
    if k == 0 {
        return x.clone();
    }
    SparseVec::from_pairs(
        x.iter()
            .filter(|(n, _)| *n > k)
            .map(|(n, v)| (n - k, v.clone() * S::from_real(w.product(n - k, n - 1)))),
    )
}

/// The weighted backward shift as a [`LinearMap`].
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedShift<R>(pub WeightSeq<R>);

impl<S: Scalar> LinearMap<S> for WeightedShift<S::Real> {
    fn apply(&self, x: &SparseVec<S>) -> SparseVec<S> {
        apply_shift(&self.0, x)
    }

    fn apply_pow(&self, x: &SparseVec<S>, k: usize) -> SparseVec<S> {
        apply_shift_pow(&self.0, x, k)
    }
}

/// `(λ_k) ↦ (0, λ₃, λ₄, …)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterexampleA;

/// `(λ_k) ↦ (λ₂, 0, 0, …)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterexampleB;

pub fn counterexample_a<S: Scalar>(x: &SparseVec<S>) -> SparseVec<S> {
    SparseVec::from_pairs(x.iter().filter(|(n, _)| *n >= 3).map(|(n, v)| (n - 1, v.clone())))
}

pub fn counterexample_b<S: Scalar>(x: &SparseVec<S>) -> SparseVec<S> {
    SparseVec::from_pairs([(1, x.coeff(2))])
}

impl<S: Scalar> LinearMap<S> for CounterexampleA {
    fn apply(&self, x: &SparseVec<S>) -> SparseVec<S> {
        counterexample_a(x)
    }
}

impl<S: Scalar> LinearMap<S> for CounterexampleB {
    fn apply(&self, x: &SparseVec<S>) -> SparseVec<S> {
        counterexample_b(x)
    }
}

/// Coefficients `λ_k = ratioᵏ` for every `k ≥ start`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricTail<R> {
    pub ratio: R,
    pub start: usize,
}

impl<R: RealScalar> GeometricTail<R> {
    fn coefficient(&self, k: usize) -> R {
        if k < self.start {
            R::zero()
        } else {
            self.ratio.powu(k as u64)
        }
    }

    /// `Σ_{k≥start} |ratio|ᵏ`.
    pub fn l1_norm(&self) -> R {
        let r = self.ratio.modulus();
        r.powu(self.start as u64) / (R::one() - r)
    }
}

/// `T_λ = Σ_k λ_k B_wᵏ` with finitely supported `λ`, plus an optional
/// geometric tail.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSeries<S: Scalar> {
    lambda: SparseVec<S>,
    weights: WeightSeq<S::Real>,
    tail: Option<GeometricTail<S::Real>>,
}

impl<S: Scalar> OperatorSeries<S> {
    pub fn new(lambda: SparseVec<S>, weights: WeightSeq<S::Real>) -> Self {
        OperatorSeries {
            lambda,
            weights,
            tail: None,
        }
    }

    pub fn with_tail(mut self, tail: GeometricTail<S::Real>) -> Result<Self, Error> {
        let r = tail.ratio.modulus();
        if tail.start <= self.lambda.degree() || tail.start == 0 || r >= S::Real::one() || r.is_zero() {
            return Err(Error::InvalidTail);
        }
        self.tail = Some(tail);
        Ok(self)
    }

    pub fn lambda(&self) -> &SparseVec<S> {
        &self.lambda
    }

    pub fn weights(&self) -> &WeightSeq<S::Real> {
        &self.weights
    }

    pub fn tail(&self) -> Option<&GeometricTail<S::Real>> {
        self.tail.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.is_zero() && self.tail.is_none()
    }

    /// `p_λ`, the lowest power present.
    pub fn min_power(&self) -> Result<usize, Error> {
        match (self.lambda.min_support(), &self.tail) {
            (Ok(p), _) => Ok(p),
            (Err(_), Some(t)) => Ok(t.start),
            (Err(e), None) => Err(e),
        }
    }

    /// `λ_k`, including tail coefficients.
    pub fn coefficient(&self, k: usize) -> S {
        match &self.tail {
            Some(t) if k >= t.start => S::from_real(t.coefficient(k)),
            _ => self.lambda.coeff(k),
        }
    }

    /// Every nonzero `(k, λ_k)` with `k < bound`.
    pub(crate) fn coefficients_below(&self, bound: usize) -> Vec<(usize, S)> {
        let mut out: Vec<(usize, S)> = self
            .lambda
            .iter()
            .filter(|(k, _)| *k < bound)
            .cloned()
            .collect();
        if let Some(t) = &self.tail {
            out.extend((t.start..bound).map(|k| (k, S::from_real(t.coefficient(k)))));
        }
        out
    }

    /// `‖λ‖₁`, the operator-norm upper bound `‖T_λ‖ ≤ ‖λ‖₁`.
    pub fn l1_norm(&self) -> S::Real {
        let tail = self.tail.as_ref().map_or(S::Real::zero(), |t| t.l1_norm());
        self.lambda.norm1() + tail
    }

    /// The same series with every power below `k0` removed.
    pub fn truncated_below(&self, k0: usize) -> Self {
        OperatorSeries {
            lambda: self.lambda.truncate_below(k0),
            weights: self.weights.clone(),
            tail: self.tail.clone(),
        }
    }

    /// Upper bound on `‖T_λ − T_μ‖` by the ℓ₁ distance of coefficients.
    pub fn coefficient_distance(&self, other: &Self) -> S::Real {
        let finite = (&self.lambda - &other.lambda).norm1();
        let tails = if self.tail == other.tail {
            S::Real::zero()
        } else {
            self.tail.as_ref().map_or(S::Real::zero(), |t| t.l1_norm())
                + other.tail.as_ref().map_or(S::Real::zero(), |t| t.l1_norm())
        };
        finite + tails
    }

    /// Closed form of `T_λ(x_{N+1}) = Σ_{n=1}^{N} λ_{N+1−n} ∏_{i=n}^{N} w_i · x_n`.
    pub fn apply_to_basis_closed_form(&self, n_top: usize) -> SparseVec<S> {
        SparseVec::from_pairs((1..=n_top).map(|n| {
            let lam = self.coefficient(n_top + 1 - n);
            let v = if lam.is_zero() {
                lam
            } else {
                lam * S::from_real(self.weights.product(n, n_top))
            };
            (n, v)
        }))
    }

    /// `(lower, upper)` bracket on `‖T_λ‖` over ℓ₁: the lower bound probes
    /// `e_2 … e_{N+1}`, the upper bound is `‖λ‖₁`.
    pub fn norm_bracket(&self, depth: usize) -> (S::Real, S::Real) {
        let mut lower = S::Real::zero();
        for n in 1..=depth {
            let v = self.apply(&SparseVec::basis(n + 1)).norm1();
            if v > lower {
                lower = v;
            }
        }
        (lower, self.l1_norm())
    }
}

impl<S: Scalar> LinearMap<S> for OperatorSeries<S> {
    fn apply(&self, x: &SparseVec<S>) -> SparseVec<S> {
        let top = x.degree();
        if top < 2 {
            return SparseVec::zero();
        }
        let mut acc = alloc::vec![S::zero(); top - 1];
        let mut touched = alloc::vec![false; top - 1];
        for (k, lam) in self.coefficients_below(top) {
            for (m, xm) in x.iter().filter(|(m, _)| *m > k) {
                let n = m - k;
                let term = lam.clone() * xm.clone() * S::from_real(self.weights.product(n, m - 1));
                let slot = &mut acc[n - 1];
                *slot = if touched[n - 1] {
                    core::mem::replace(slot, S::zero()) + term
                } else {
                    term
                };
                touched[n - 1] = true;
            }
        }
        SparseVec::from_dense(&acc)
    }
}
