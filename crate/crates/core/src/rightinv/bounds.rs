//! The growth functions bounding right inverses, evaluated in log domain.
//!
//! ```text
//! F_λ(d)      = C_X (d+1)! (max_{0≤i<d} |λ_{p+i}|)^{d−1} / (|λ_p|^d  w_{p+d}^{d·p})
//! G_{k₀,δ}(d) = C_X (d+1)! (sup_j max_{0≤i<d} |λʲ_{k₀+i}|)^{d−1} / (δ^d  w_{k₀+d}^{d·k₀})
//! ```
//!
//! Raw values overflow `f64` for modest `d`, so only logarithms are formed.

use crate::scalar::{ln_factorial, RealScalar, Scalar};
use crate::shift::OperatorSeries;
use crate::space::WeightSeq;
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum BoundKind {
    F { p: usize, c_x: f64 },
    G { k0: usize, ln_delta: f64, c_x: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundEval {
    pub d: usize,
    /// Natural log of the bound.
    pub log_value: f64,
    pub kind: BoundKind,
}

impl BoundEval {
    pub fn value(&self) -> f64 {
        libm::exp(self.log_value)
    }
}

fn ln_core(c_x: f64, d: usize, ln_sup: f64, ln_lead: f64, base: usize, w_ln: f64) -> f64 {
    let mut v = libm::log(c_x) + ln_factorial(d as u64 + 1) - d as f64 * ln_lead
        - (d * base) as f64 * w_ln;
    if d > 1 {
        v += (d - 1) as f64 * ln_sup;
    }
    v
}

/// `F_λ(d)`.
pub fn eval_f<S: Scalar>(series: &OperatorSeries<S>, c_x: f64, d: usize) -> Result<BoundEval, Error> {
    let p = series.min_power().map_err(|_| Error::NullLambda)?;
    let ln_lead = series.coefficient(p).log_magnitude().ln_abs;
    let ln_sup = (0..d.max(1))
        .map(|i| series.coefficient(p + i).log_magnitude().ln_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundEval {
        d,
        log_value: ln_core(c_x, d, ln_sup, ln_lead, p, series.weights().ln_weight(p + d)),
        kind: BoundKind::F { p, c_x },
    })
}

/// `G_{k₀,δ}(d)`; `max_abs_by_offset[i] = sup_j |λʲ_{k₀+i}|`, missing offsets
/// count as zero.
pub fn eval_g<R: RealScalar>(
    max_abs_by_offset: &[R],
    k0: usize,
    delta: &R,
    w: &WeightSeq<R>,
    c_x: f64,
    d: usize,
) -> Result<BoundEval, Error> {
    if !delta.is_positive() {
        return Err(Error::NonPositiveDelta);
    }
    match max_abs_by_offset.first() {
        Some(s0) if s0 >= delta => {}
        _ => return Err(Error::InconsistentSup),
    }
    let ln_sup = max_abs_by_offset
        .iter()
        .take(d.max(1))
        .map(|v| v.ln_abs())
        .fold(f64::NEG_INFINITY, f64::max);
    let ln_delta = delta.ln_abs();
    Ok(BoundEval {
        d,
        log_value: ln_core(c_x, d, ln_sup, ln_delta, k0, w.ln_weight(k0 + d)),
        kind: BoundKind::G { k0, ln_delta, c_x },
    })
}

/// Log of the entrywise bound on the inverse system matrix:
/// `(d−1)! max|λ|^{d−1} / (|λ_p|^d w_{p+d}^{d·p})`.
pub fn inverse_entry_log_bound<S: Scalar>(series: &OperatorSeries<S>, d: usize) -> Result<f64, Error> {
    let f = eval_f(series, 1.0, d)?;
    // F_λ(d) with C_X = 1 carries (d+1)! instead of (d−1)!
    Ok(f.log_value - ln_factorial(d as u64 + 1) + ln_factorial(d as u64 - 1))
}
