//! Families `(λᵐ)` approaching a limit operator `U`: coordinate limits,
//! the leading index `k₀` with its lower bound `δ`, tail operators, and the
//! schedule `m₁ < m₂ < …` making `‖R_{m_k}ᵏ − Uᵏ‖` small enough.

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::rightinv::eval_g;
use crate::scalar::{RealScalar, Scalar};
use crate::shift::{LinearMap, OperatorSeries};
use crate::space::{SparseVec, WeightSeq};
use crate::Error;

/// Number of members used per polynomial extrapolation in `1/m`.
pub const EXTRAPOLATION_NODES: usize = 4;

/// A finite family `λ¹, …, λᴹ` of finitely supported sequences.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqFamily<S: Scalar> {
    members: Vec<SparseVec<S>>,
    limit: Option<SparseVec<S>>,
    generator: String,
}

impl<S: Scalar> SeqFamily<S> {
    pub fn new(members: Vec<SparseVec<S>>, generator: impl Into<String>) -> Self {
        SeqFamily {
            members,
            limit: None,
            generator: generator.into(),
        }
    }

    /// `len` copies of `lambda`.
    pub fn constant(lambda: SparseVec<S>, len: usize) -> Self {
        let mut fam = SeqFamily::new(alloc::vec![lambda.clone(); len], "constant");
        fam.limit = Some(lambda);
        fam
    }

    /// Attaches the known limit `λ^∞`.
    pub fn with_limit(mut self, limit: SparseVec<S>) -> Self {
        self.limit = Some(limit);
        self
    }

    pub fn members(&self) -> &[SparseVec<S>] {
        &self.members
    }

    /// `λᵐ`, 1-based.
    pub fn member(&self, m: usize) -> &SparseVec<S> {
        &self.members[m - 1]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn limit(&self) -> Option<&SparseVec<S>> {
        self.limit.as_ref()
    }

    pub fn generator(&self) -> &str {
        &self.generator
    }

    pub fn max_degree(&self) -> usize {
        self.members.iter().map(SparseVec::degree).max().unwrap_or(0)
    }

    /// First index of a constant final run covering at least the last
    /// quarter of the family (and two members).
    pub fn constant_from(&self) -> Option<usize> {
        let last = self.members.last()?;
        let run = self.members.iter().rev().take_while(|m| *m == last).count();
        (run >= 2 && run >= self.len() / 4).then(|| self.len() - run + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitEstimate<S: Scalar> {
    pub k: usize,
    pub estimate: S,
    /// Largest deviation of the estimates over the last quarter.
    pub spread: f64,
    pub convergent: bool,
}

/// Polynomial extrapolation to `h = 0` through `(h_i, v_i)` (Neville).
fn extrapolate_to_zero<S: Scalar>(h: &[S], v: &[S]) -> S {
    let mut p = v.to_vec();
    let n = h.len();
    for level in 1..n {
        for i in 0..n - level {
            let num = h[i].clone() * p[i + 1].clone() - h[i + level].clone() * p[i].clone();
            p[i] = num / (h[i].clone() - h[i + level].clone());
        }
    }
    p.swap_remove(0)
}

/// Estimate of `lim_m λᵐ_k` from the members up to `end`, using the
/// members `end, end/2, end/4, …` as nodes in `h = 1/m`. Families of the
/// form `a + b/m + c/m² + d/m³` are reproduced exactly in rational mode;
/// geometric perturbations fade with the smallest node.
/// Inside a constant final run the member itself is returned.
fn estimate_at<S: Scalar>(fam: &SeqFamily<S>, k: usize, end: usize, constant_from: Option<usize>) -> S {
    if constant_from.is_some_and(|c| end >= c) {
        return fam.member(end).coeff(k);
    }
    let mut nodes: Vec<usize> = Vec::with_capacity(EXTRAPOLATION_NODES);
    let mut m = end;
    while m >= 1 && nodes.len() < EXTRAPOLATION_NODES {
        if nodes.last() != Some(&m) {
            nodes.push(m);
        }
        m /= 2;
    }
    let h: Vec<S> = nodes
        .iter()
        .map(|&m| S::from_real(S::Real::from_ratio(1, m as i64)))
        .collect();
    let v: Vec<S> = nodes.iter().map(|&m| fam.member(m).coeff(k)).collect();
    extrapolate_to_zero(&h, &v)
}

/// Per-coordinate limit estimates for `k = 1..=kmax`.
///
/// A coordinate is flagged convergent when the estimates computed from
/// every prefix ending in the last quarter agree within `tol` (`tol = 0`
/// demands exact stabilisation).
pub fn detect_limits<S: Scalar>(
    fam: &SeqFamily<S>,
    kmax: usize,
    tol: f64,
) -> Result<Vec<LimitEstimate<S>>, Error> {
    if fam.len() < 3 {
        return Err(Error::FamilyTooShort { len: fam.len(), min: 3 });
    }
    let len = fam.len();
    let first_end = (len - len / 4).min(len - 1);
    let constant_from = fam.constant_from();
    Ok((1..=kmax)
        .map(|k| {
            let estimate = estimate_at(fam, k, len, constant_from);
            let spread = (first_end..len)
                .map(|end| (estimate_at(fam, k, end, constant_from) - estimate.clone()).modulus().to_f64())
                .fold(0.0, f64::max);
            LimitEstimate {
                k,
                estimate,
                spread,
                convergent: spread <= tol,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct K0Delta<S: Scalar> {
    pub k0: usize,
    pub delta: S::Real,
    /// First member of the tail over which `δ` is the infimum.
    pub m0: usize,
    pub limits: Vec<LimitEstimate<S>>,
}

impl<S: Scalar> K0Delta<S> {
    /// The estimated limit sequence `λ^∞`.
    pub fn limit_vector(&self) -> SparseVec<S> {
        SparseVec::from_pairs(self.limits.iter().map(|l| (l.k, l.estimate.clone())))
    }
}

/// `k₀` is the first coordinate with a nonzero limit (modulus above `tol`);
/// `δ = inf_{m ≥ m₀} |λᵐ_{k₀}|` including the limit itself.
pub fn detect_k0_delta<S: Scalar>(fam: &SeqFamily<S>, tol: f64) -> Result<K0Delta<S>, Error> {
    let limits = detect_limits(fam, fam.max_degree(), tol)?;
    let k0 = limits
        .iter()
        .find(|l| !l.estimate.is_zero() && l.estimate.modulus().to_f64() > tol)
        .map(|l| l.k)
        .ok_or(Error::NullLimit)?;
    let m0 = fam
        .members()
        .iter()
        .rposition(|m| m.coeff(k0).is_zero())
        .map_or(1, |pos| pos + 2);
    if m0 > fam.len() {
        return Err(Error::DegenerateTail { k0 });
    }
    let delta = fam.members()[m0 - 1..]
        .iter()
        .map(|m| m.coeff(k0).modulus())
        .fold(limits[k0 - 1].estimate.modulus(), S::Real::min_of);
    Ok(K0Delta {
        k0,
        delta,
        m0,
        limits,
    })
}

/// `R = Σ_{k ≥ k₀} λ_k B_wᵏ`.
pub fn tail_operator<S: Scalar>(lambda: &SparseVec<S>, k0: usize, w: &WeightSeq<S::Real>) -> OperatorSeries<S> {
    OperatorSeries::new(lambda.truncate_below(k0), w.clone())
}

/// `max_x ‖R₁R₂x − R₂R₁x‖₁` over the probes.
pub fn commutator_residual<S: Scalar>(
    r1: &OperatorSeries<S>,
    r2: &OperatorSeries<S>,
    probes: &[SparseVec<S>],
) -> Result<S::Real, Error> {
    if r1.weights() != r2.weights() {
        return Err(Error::MismatchedWeights);
    }
    Ok(probes
        .iter()
        .map(|x| (&r1.apply(&r2.apply(x)) - &r2.apply(&r1.apply(x))).norm1())
        .fold(S::Real::zero(), S::Real::max_of))
}

/// Upper bound on `‖Rᵏ − Uᵏ‖ ≤ ‖R − U‖ Σ_{i<k} ‖R‖^{k−1−i} ‖U‖ⁱ`, with
/// `‖R − U‖` bounded by the ℓ₁ distance of coefficients.
pub fn power_diff_bound<S: Scalar>(
    rm: &OperatorSeries<S>,
    u: &OperatorSeries<S>,
    k: usize,
    norm_rm: &S::Real,
    norm_u: &S::Real,
) -> S::Real {
    let dist = rm.coefficient_distance(u);
    if dist.is_zero() || k == 0 {
        return S::Real::zero();
    }
    let sum = (0..k).fold(S::Real::zero(), |acc, i| {
        acc + norm_rm.powu((k - 1 - i) as u64) * norm_u.powu(i as u64)
    });
    dist * sum
}

/// Parameters of `G_{k₀,δ}` for a family.
#[derive(Clone, Debug, PartialEq)]
pub struct GParams<R> {
    pub k0: usize,
    pub delta: R,
    /// `sup_{m ≥ m₀} |λᵐ_{k₀+i}|` for every offset `i` inside the supports.
    pub sups: Vec<R>,
    pub c_x: f64,
}

impl<R: RealScalar> GParams<R> {
    pub fn from_family<S: Scalar<Real = R>>(fam: &SeqFamily<S>, k0: usize, delta: R, m0: usize, c_x: f64) -> Self {
        let top = fam.max_degree().max(k0);
        let sups = (k0..=top)
            .map(|k| {
                fam.members()[m0 - 1..]
                    .iter()
                    .map(|m| m.coeff(k).modulus())
                    .fold(R::zero(), R::max_of)
            })
            .collect();
        GParams { k0, delta, sups, c_x }
    }

    /// `ln G_{k₀,δ}(d)`.
    pub fn ln_g(&self, w: &WeightSeq<R>, d: usize) -> Result<f64, Error> {
        Ok(eval_g(&self.sups, self.k0, &self.delta, w, self.c_x, d)?.log_value)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MkSchedule<S: Scalar> {
    /// `m_1 < m_2 < … < m_kmax`, 1-based member indices.
    pub indices: Vec<usize>,
    pub k0: usize,
    pub delta: S::Real,
    pub m0: usize,
    /// `ln(2^{−k} G(k²)^{−k})` per step.
    pub log_thresholds: Vec<f64>,
    /// `ln` of the power-difference bound at the chosen index (`-inf` for 0).
    pub log_bounds: Vec<f64>,
    pub limit: SparseVec<S>,
    pub g: GParams<S::Real>,
}

/// The limit used for `U`: the attached closed form, else the constant
/// final run, else the extrapolated estimates.
pub fn resolve_limit<S: Scalar>(fam: &SeqFamily<S>, kd: &K0Delta<S>) -> SparseVec<S> {
    if let Some(l) = fam.limit() {
        return l.clone();
    }
    if let Some(m) = fam.constant_from() {
        return fam.member(m).clone();
    }
    kd.limit_vector()
}

/// Chooses the smallest increasing `m_k` with
/// `‖R_{m_k}ᵏ − Uᵏ‖ ≤ 2^{−k} G_{k₀,δ}(k²)^{−k}`, compared in log domain.
pub fn select_mk<S: Scalar>(
    fam: &SeqFamily<S>,
    w: &WeightSeq<S::Real>,
    kmax: usize,
    c_x: f64,
    tol: f64,
) -> Result<MkSchedule<S>, Error> {
    let kd = detect_k0_delta(fam, tol)?;
    let limit = resolve_limit(fam, &kd);
    let u = tail_operator(&limit, kd.k0, w);
    let norm_u = u.l1_norm();
    let g = GParams::from_family(fam, kd.k0, kd.delta.clone(), kd.m0, c_x);

    let mut indices = Vec::with_capacity(kmax);
    let mut log_thresholds = Vec::with_capacity(kmax);
    let mut log_bounds = Vec::with_capacity(kmax);
    let mut prev = kd.m0 - 1;
    for k in 1..=kmax {
        let threshold = -(k as f64) * (core::f64::consts::LN_2 + g.ln_g(w, k * k)?);
        let mut best = f64::INFINITY;
        let mut chosen = None;
        for m in prev + 1..=fam.len() {
            let rm = tail_operator(fam.member(m), kd.k0, w);
            let bound = power_diff_bound(&rm, &u, k, &rm.l1_norm(), &norm_u);
            let ln = if bound.is_zero() { f64::NEG_INFINITY } else { bound.ln_abs() };
            if ln <= threshold {
                chosen = Some((m, ln));
                break;
            }
            best = best.min(ln);
        }
        match chosen {
            Some((m, ln)) => {
                indices.push(m);
                log_thresholds.push(threshold);
                log_bounds.push(ln);
                prev = m;
            }
            None => {
                return Err(Error::InsufficientConvergenceDepth {
                    k,
                    log_gap: best - threshold,
                })
            }
        }
    }
    Ok(MkSchedule {
        indices,
        k0: kd.k0,
        delta: kd.delta,
        m0: kd.m0,
        log_thresholds,
        log_bounds,
        limit,
        g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn harmonic(len: usize) -> SeqFamily<Rational> {
        let members = (1..=len as i64)
            .map(|m| SparseVec::from_dense(&[q(1, m), q(1, 1) + q(1, m)]))
            .collect();
        SeqFamily::new(members, "harmonic")
    }

    #[test]
    fn harmonic_family_limits() {
        let lim = detect_limits(&harmonic(200), 2, 0.0).unwrap();
        assert_eq!(lim[0].estimate, q(0, 1));
        assert_eq!(lim[1].estimate, q(1, 1));
        assert!(lim.iter().all(|l| l.convergent));
    }

    #[test]
    fn constant_family_limits_are_exact() {
        let lam = SparseVec::from_pairs([(3, q(3, 1))]);
        let fam = SeqFamily::constant(lam.clone(), 16);
        let lim = detect_limits(&fam, 3, 0.0).unwrap();
        assert_eq!(SparseVec::from_pairs(lim.iter().map(|l| (l.k, l.estimate.clone()))), lam);
        let kd = detect_k0_delta(&fam, 0.0).unwrap();
        assert_eq!((kd.k0, kd.delta), (3, q(3, 1)));
    }

    #[test]
    fn oscillating_coordinate_is_flagged() {
        let members = (1..=64)
            .map(|m: i64| SparseVec::from_dense(&[q(if m % 2 == 0 { 1 } else { -1 }, 1)]))
            .collect();
        let lim = detect_limits(&SeqFamily::new(members, "alternating"), 1, 1e-8).unwrap();
        assert!(!lim[0].convergent);
    }

    #[test]
    fn k0_delta_of_harmonic_family() {
        let kd = detect_k0_delta(&harmonic(200), 0.0).unwrap();
        assert_eq!(kd.k0, 2);
        assert_eq!(kd.delta, q(1, 1));
        assert_eq!(kd.m0, 1);
    }

    #[test]
    fn null_limit_is_rejected() {
        let members = (1..=32).map(|m| SparseVec::from_dense(&[q(1, m)])).collect();
        assert_eq!(
            detect_k0_delta(&SeqFamily::new(members, "vanishing"), 0.0),
            Err(Error::NullLimit)
        );
        let short = SeqFamily::new(alloc::vec![SparseVec::<Rational>::basis(1); 2], "short");
        assert_eq!(detect_limits(&short, 1, 0.0), Err(Error::FamilyTooShort { len: 2, min: 3 }));
    }

    #[test]
    fn tail_operator_zeroes_low_coordinates() {
        let lam = SparseVec::from_dense(&[q(1, 1), q(1, 2), q(1, 4)]);
        let w = WeightSeq::constant_one();
        let t = tail_operator(&lam, 2, &w);
        assert_eq!(t.lambda(), &SparseVec::from_pairs([(2, q(1, 2)), (3, q(1, 4))]));
        assert_eq!(tail_operator(&lam, 1, &w).lambda(), &lam);
        let full = OperatorSeries::new(lam, w);
        assert_eq!(t.coefficient_distance(&full), q(1, 1));
    }

    #[test]
    fn power_difference_examples() {
        let w = WeightSeq::constant_one();
        let u = OperatorSeries::new(SparseVec::from_dense(&[q(1, 2), q(1, 2)]), w.clone());
        let rm = OperatorSeries::new(SparseVec::from_dense(&[q(1, 2), q(3, 8)]), w);
        let one = q(1, 1);
        assert_eq!(power_diff_bound(&u, &u, 3, &one, &one), q(0, 1));
        assert_eq!(power_diff_bound(&rm, &u, 1, &one, &one), q(1, 8));
        assert_eq!(power_diff_bound(&rm, &u, 3, &one, &one), q(3, 8));
    }

    #[test]
    fn commutators_vanish_and_weights_must_match() {
        let w = WeightSeq::geometric(q(1, 2), q(1, 2)).unwrap();
        let a = OperatorSeries::new(SparseVec::from_dense(&[q(1, 3), q(0, 1), q(-2, 1)]), w.clone());
        let b = OperatorSeries::new(SparseVec::from_pairs([(2, q(5, 7)), (4, q(1, 1))]), w);
        let probes: Vec<_> = (1..=20).map(SparseVec::basis).collect();
        assert_eq!(commutator_residual(&a, &b, &probes).unwrap(), q(0, 1));
        assert_eq!(commutator_residual(&a, &a, &probes).unwrap(), q(0, 1));
        let c = OperatorSeries::new(SparseVec::basis(1), WeightSeq::constant_one());
        assert_eq!(commutator_residual(&a, &c, &probes), Err(Error::MismatchedWeights));
    }

    #[test]
    fn schedule_for_eventually_constant_family() {
        let lam = SparseVec::from_dense(&[q(1, 1)]);
        let mut members: Vec<_> = (1..=4).map(|m| SparseVec::from_dense(&[q(3, 1) + q(1, m)])).collect();
        members.extend(core::iter::repeat_n(lam, 28));
        let fam = SeqFamily::new(members, "eventually-constant");
        let s = select_mk(&fam, &WeightSeq::constant_one(), 5, 1.0, 0.0).unwrap();
        assert_eq!(s.indices, alloc::vec![5, 6, 7, 8, 9]);
        assert!(s.log_bounds.iter().all(|b| *b == f64::NEG_INFINITY));

        let fam = SeqFamily::constant(SparseVec::from_dense(&[q(1, 1)]), 8);
        let s = select_mk(&fam, &WeightSeq::constant_one(), 4, 1.0, 0.0).unwrap();
        assert_eq!(s.indices, alloc::vec![1, 2, 3, 4]);
    }

    #[test]
    fn schedule_reports_insufficient_depth() {
        let members = (1..=200).map(|m| SparseVec::from_dense(&[q(1, 1) + q(1, m)])).collect();
        let fam = SeqFamily::new(members, "harmonic").with_limit(SparseVec::from_dense(&[q(1, 1)]));
        match select_mk(&fam, &WeightSeq::constant_one(), 3, 1.0, 0.0) {
            Err(Error::InsufficientConvergenceDepth { k, log_gap }) => {
                assert_eq!(k, 2);
                assert!(log_gap > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
