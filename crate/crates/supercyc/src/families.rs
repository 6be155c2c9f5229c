//! Families `(λᵐ)` described by a config entry.

use supercyc_core::limits::SeqFamily;
use supercyc_core::{Rational, RealScalar, SparseVec};

use crate::config::{FamilySpec, Vector};
use crate::num::{convert, ModeScalar};
use crate::ConfigError;

const MIN_LEN: usize = 3;

fn check_len(len: usize) -> Result<(), ConfigError> {
    if len < MIN_LEN {
        Err(ConfigError::Invalid(format!("family length {len} is below {MIN_LEN}")))
    } else {
        Ok(())
    }
}

fn harmonic_member(lambda: &Vector, v: &Vector, m: usize) -> SparseVec<Rational> {
    lambda.0.add_scaled(&Rational::from_ratio(1, m as i64), &v.0)
}

/// Builds the family exactly, then rounds once into the run's scalar type.
pub fn build_family<S: ModeScalar>(spec: &FamilySpec) -> Result<SeqFamily<S>, ConfigError> {
    let (members, limit, label): (Vec<SparseVec<Rational>>, Option<SparseVec<Rational>>, &str) = match spec {
        FamilySpec::Constant { lambda, len } => {
            check_len(*len)?;
            (vec![lambda.0.clone(); *len], None, "constant")
        }
        FamilySpec::EventuallyConstant {
            lambda,
            perturbation,
            switch,
            len,
        } => {
            check_len(*len)?;
            if *switch > *len {
                return Err(ConfigError::Invalid(format!(
                    "switch {switch} lies beyond the family length {len}"
                )));
            }
            let members = (1..=*len)
                .map(|m| if m < *switch { harmonic_member(lambda, perturbation, m) } else { lambda.0.clone() })
                .collect();
            (members, None, "eventually constant")
        }
        FamilySpec::Harmonic {
            lambda,
            perturbation,
            len,
        } => {
            check_len(*len)?;
            let members = (1..=*len).map(|m| harmonic_member(lambda, perturbation, m)).collect();
            (members, Some(lambda.0.clone()), "harmonic")
        }
        FamilySpec::Null { perturbation, len } => {
            check_len(*len)?;
            let zero = Vector(SparseVec::zero());
            let members = (1..=*len).map(|m| harmonic_member(&zero, perturbation, m)).collect();
            (members, Some(SparseVec::zero()), "null limit")
        }
        FamilySpec::Explicit { members, limit } => {
            check_len(members.len())?;
            (
                members.iter().map(|v| v.0.clone()).collect(),
                limit.as_ref().map(|v| v.0.clone()),
                "explicit",
            )
        }
    };
    let fam = SeqFamily::new(members.iter().map(convert::<S>).collect(), label);
    Ok(match limit {
        Some(l) => fam.with_limit(convert(&l)),
        None => fam,
    })
}

/// `α₁λ¹ + α₂λ²`.
pub fn combine(a1: &Rational, l1: &SparseVec<Rational>, a2: &Rational, l2: &SparseVec<Rational>) -> SparseVec<Rational> {
    l1.scaled(a1).add_scaled(a2, l2)
}

/// Whether two finitely supported vectors are linearly independent.
pub fn independent(l1: &SparseVec<Rational>, l2: &SparseVec<Rational>) -> bool {
    if l1.is_zero() || l2.is_zero() {
        return false;
    }
    let n = l1.entries()[0].0;
    let ratio = l2.coeff(n) / l1.coeff(n);
    l2 != &l1.scaled(&ratio)
}
