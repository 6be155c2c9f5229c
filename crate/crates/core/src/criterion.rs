//! The Supercyclicity Criterion harness with `n_k = k` and
//! `𝒟₁ = 𝒟₂ = X_∞`.
//!
//! For a limit operator `U` the maps are `S_k = S̃_{m_k}ᵏ`, right inverses
//! of the tail series `R_{m_k}`. The report records `‖Uᵏx₀‖`, `‖S_k y₀‖`,
//! their product and `‖Uᵏ S_k y₀ − y₀‖` for every `k`.

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;
use rand::Rng;

use crate::limits::{
    commutator_residual, detect_k0_delta, select_mk, tail_operator, GParams, MkSchedule, SeqFamily,
};
use crate::rightinv::{apply_s_lambda_pow, iterate_dimension, solve_right_inverse};
use crate::scalar::{RealScalar, Scalar};
use crate::shift::{LinearMap, OperatorSeries};
use crate::space::{SparseVec, WeightSeq};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionRow<R> {
    pub k: usize,
    pub n_k: usize,
    pub norm_uk: R,
    pub norm_sk: R,
    pub product: R,
    pub residual: R,
    /// `ln(G_{k₀,δ}(d_k^{y₀})ᵏ ‖y₀‖)`, the a-priori bound on `‖S_k y₀‖`.
    pub ln_sk_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport<R> {
    pub rows: Vec<CriterionRow<R>>,
    pub k0: usize,
    pub m_k: Vec<usize>,
    /// Products tend to zero over the computed range.
    pub cond1: bool,
    /// First `k` from which every product is within the tolerance.
    pub cond1_from: Option<usize>,
    /// Residuals tend to zero over the computed range.
    pub cond2: bool,
    pub cond2_from: Option<usize>,
    /// Every `‖S_k y₀‖` respects its a-priori bound.
    pub bounds_hold: bool,
}

impl<R> CriterionReport<R> {
    pub fn satisfied(&self) -> bool {
        self.cond1 && self.cond2
    }
}

/// Where the maps `S_k` come from.
#[derive(Debug)]
pub enum InverseSource<'a, S: Scalar> {
    /// `U` is itself a tail series; `S_k = S_Uᵏ`.
    Exact,
    /// `S_k = S̃_{m_k}ᵏ` built from the family members on the schedule.
    Schedule {
        family: &'a SeqFamily<S>,
        schedule: &'a MkSchedule<S>,
    },
}

impl<S: Scalar> Clone for InverseSource<'_, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S: Scalar> Copy for InverseSource<'_, S> {}

/// First 1-based position from which every value is within `tol`.
pub fn settles_from<R: RealScalar>(values: &[R], tol: f64) -> Option<usize> {
    let tol = R::from_f64(tol).unwrap_or_else(R::zero);
    let tail = values.iter().rev().take_while(|v| **v <= tol).count();
    (tail > 0).then(|| values.len() - tail + 1)
}

/// The finite-data reading of `→ 0`: the column ends in a run of values
/// within `tol`.
pub fn trends_to_zero<R: RealScalar>(values: &[R], tol: f64) -> bool {
    settles_from(values, tol).is_some()
}

fn ln_norm<R: RealScalar>(v: &R) -> f64 {
    v.ln_abs()
}

pub fn criterion_check<S: Scalar>(
    u: &OperatorSeries<S>,
    source: InverseSource<'_, S>,
    x0: &SparseVec<S>,
    y0: &SparseVec<S>,
    kmax: usize,
    tol: f64,
) -> Result<CriterionReport<S::Real>, Error> {
    if u.is_zero() {
        return Err(Error::NullLimit);
    }
    if x0.is_zero() {
        return Err(Error::ZeroVector("x0"));
    }
    if y0.is_zero() {
        return Err(Error::ZeroVector("y0"));
    }
    let (k0, g, m_k) = match source {
        InverseSource::Exact => {
            let k0 = u.min_power()?;
            let lambda = u.lambda();
            let top = lambda.degree().max(k0);
            let sups = (k0..=top).map(|k| lambda.coeff(k).modulus()).collect();
            let g = GParams {
                k0,
                delta: u.coefficient(k0).modulus(),
                sups,
                c_x: 1.0,
            };
            (k0, g, Vec::new())
        }
        InverseSource::Schedule { schedule, .. } => {
            if schedule.indices.len() < kmax {
                return Err(Error::FamilyTooShort {
                    len: schedule.indices.len(),
                    min: kmax,
                });
            }
            (schedule.k0, schedule.g.clone(), schedule.indices[..kmax].to_vec())
        }
    };
    let w = u.weights();
    let q_y = y0.degree();
    let ln_y = ln_norm(&y0.norm1());

    let mut rows = Vec::with_capacity(kmax);
    let mut ux = x0.clone();
    let mut s_exact = y0.clone();
    let mut bounds_hold = true;
    for k in 1..=kmax {
        ux = u.apply(&ux);
        let sk = match source {
            InverseSource::Exact => {
                s_exact = solve_right_inverse(u, s_exact.degree(), &s_exact)?;
                s_exact.clone()
            }
            InverseSource::Schedule { family, .. } => {
                let r = tail_operator(family.member(m_k[k - 1]), k0, w);
                apply_s_lambda_pow(&r, y0, k)?
            }
        };
        let back = u.apply_pow(&sk, k);
        let norm_uk = ux.norm1();
        let norm_sk = sk.norm1();
        let product = norm_uk.clone() * norm_sk.clone();
        let residual = (&back - y0).norm1();
        let ln_sk_bound = k as f64 * g.ln_g(w, iterate_dimension(k0, q_y, k))? + ln_y;
        let ln_sk = ln_norm(&norm_sk);
        if ln_sk > ln_sk_bound + 1e-9 * ln_sk_bound.abs().max(1.0) {
            bounds_hold = false;
        }
        rows.push(CriterionRow {
            k,
            n_k: k,
            norm_uk,
            norm_sk,
            product,
            residual,
            ln_sk_bound,
        });
    }
    let products: Vec<S::Real> = rows.iter().map(|r| r.product.clone()).collect();
    let residuals: Vec<S::Real> = rows.iter().map(|r| r.residual.clone()).collect();
    Ok(CriterionReport {
        cond1: trends_to_zero(&products, tol),
        cond1_from: settles_from(&products, tol),
        cond2: trends_to_zero(&residuals, tol),
        cond2_from: settles_from(&residuals, tol),
        rows,
        k0,
        m_k,
        bounds_hold,
    })
}

/// Random finitely supported vectors with bounded support and height.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XInfSampler {
    /// Indices are drawn from `1..=max_index`.
    pub max_index: usize,
    pub max_nnz: usize,
    /// Coefficients are `a/b` with `0 < |a| ≤ height`, `1 ≤ b ≤ height`.
    pub height: i64,
}

impl Default for XInfSampler {
    fn default() -> Self {
        XInfSampler {
            max_index: 6,
            max_nnz: 3,
            height: 4,
        }
    }
}

impl XInfSampler {
    pub fn sample<S: Scalar, G: Rng + ?Sized>(&self, rng: &mut G) -> SparseVec<S> {
        let nnz = rng.gen_range(1..=self.max_nnz.max(1));
        let pairs: Vec<(usize, S)> = (0..nnz)
            .map(|_| {
                let idx = rng.gen_range(1..=self.max_index.max(1));
                (idx, S::from_real(self.coefficient::<S::Real, G>(rng)))
            })
            .collect();
        let v = SparseVec::from_pairs(pairs);
        if v.is_zero() {
            // duplicates can cancel; fall back to a single draw
            let idx = rng.gen_range(1..=self.max_index.max(1));
            SparseVec::from_pairs([(idx, S::from_real(self.coefficient::<S::Real, G>(rng)))])
        } else {
            v
        }
    }

    pub fn coefficient<R: RealScalar, G: Rng + ?Sized>(&self, rng: &mut G) -> R {
        let h = self.height.max(1);
        let mut a = rng.gen_range(1..=h);
        if rng.gen_bool(0.5) {
            a = -a;
        }
        R::from_ratio(a, rng.gen_range(1..=h))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Both conditions hold on every sample up to `kmax`.
    Satisfied,
    /// The pipeline ran but some stage could not certify the criterion.
    NotCertified(String),
    /// The limit operator is zero.
    ExcludedNullLimit,
}

#[derive(Clone, Debug)]
pub struct SampleReport<S: Scalar> {
    pub x0: SparseVec<S>,
    pub y0: SparseVec<S>,
    pub report: CriterionReport<S::Real>,
}

#[derive(Clone, Debug)]
pub struct ClosureReport<S: Scalar> {
    pub verdict: Verdict,
    pub k0: Option<usize>,
    pub delta: Option<S::Real>,
    pub commutator_max: Option<S::Real>,
    pub schedule: Option<MkSchedule<S>>,
    pub schedule_error: Option<Error>,
    pub samples: Vec<SampleReport<S>>,
}

#[derive(Clone, Copy, Debug)]
pub struct ClosureParams {
    pub sample_count: usize,
    pub kmax: usize,
    pub c_x: f64,
    pub tol: f64,
    pub sampler: XInfSampler,
    /// Commutators are checked on `e_1 … e_probes`.
    pub probes: usize,
}

impl Default for ClosureParams {
    fn default() -> Self {
        ClosureParams {
            sample_count: 20,
            kmax: 6,
            c_x: 1.0,
            tol: 0.0,
            sampler: XInfSampler::default(),
            probes: 20,
        }
    }
}

/// End-to-end check that the limit of a family satisfies the criterion:
/// `k₀, δ` → tail operators → commutator spot checks → `m_k` schedule →
/// criterion rows over random `(x₀, y₀)`.
pub fn closure_supercyclic_verdict<S: Scalar, G: Rng + ?Sized>(
    fam: &SeqFamily<S>,
    w: &WeightSeq<S::Real>,
    params: &ClosureParams,
    rng: &mut G,
) -> Result<ClosureReport<S>, Error> {
    let mut report = ClosureReport {
        verdict: Verdict::Satisfied,
        k0: None,
        delta: None,
        commutator_max: None,
        schedule: None,
        schedule_error: None,
        samples: Vec::new(),
    };
    let kd = match detect_k0_delta(fam, params.tol) {
        Ok(kd) => kd,
        Err(Error::NullLimit) => {
            report.verdict = Verdict::ExcludedNullLimit;
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.k0 = Some(kd.k0);
    report.delta = Some(kd.delta.clone());

    let probes: Vec<SparseVec<S>> = (1..=params.probes).map(SparseVec::basis).collect();
    let schedule = match select_mk(fam, w, params.kmax, params.c_x, params.tol) {
        Ok(s) => s,
        Err(e @ Error::InsufficientConvergenceDepth { .. }) => {
            report.verdict = Verdict::NotCertified(alloc::format!("{e}"));
            report.schedule_error = Some(e);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let u = tail_operator(&schedule.limit, kd.k0, w);
    let spots = [kd.m0, (kd.m0 + fam.len()) / 2, fam.len()];
    let mut comm = S::Real::zero();
    for &m in &spots {
        let r = tail_operator(fam.member(m), kd.k0, w);
        comm = S::Real::max_of(comm, commutator_residual(&r, &u, &probes)?);
        let first = tail_operator(fam.member(kd.m0), kd.k0, w);
        comm = S::Real::max_of(comm, commutator_residual(&first, &r, &probes)?);
    }
    let comm_ok = comm.is_zero() || comm.to_f64() <= params.tol;
    report.commutator_max = Some(comm);

    let source = InverseSource::Schedule {
        family: fam,
        schedule: &schedule,
    };
    let mut all_ok = comm_ok;
    for _ in 0..params.sample_count {
        let x0 = params.sampler.sample::<S, G>(rng);
        let y0 = params.sampler.sample::<S, G>(rng);
        let r = criterion_check(&u, source, &x0, &y0, params.kmax, params.tol)?;
        all_ok &= r.satisfied();
        report.samples.push(SampleReport { x0, y0, report: r });
    }
    report.schedule = Some(schedule);
    if !all_ok {
        report.verdict = Verdict::NotCertified(if comm_ok {
            "criterion rows do not decay over the computed range".into()
        } else {
            "tail operators fail to commute".into()
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use rand::SeedableRng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn e(n: usize) -> SparseVec<Rational> {
        SparseVec::basis(n)
    }

    #[test]
    fn backward_shift_rows() {
        let b = OperatorSeries::new(e(1), WeightSeq::constant_one());
        let r = criterion_check(&b, InverseSource::Exact, &e(2), &e(3), 5, 0.0).unwrap();
        let products: Vec<_> = r.rows.iter().map(|row| row.product.clone()).collect();
        assert_eq!(products, alloc::vec![q(1, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1)]);
        assert!(r.rows.iter().all(|row| row.residual.is_zero()));
        assert!(r.rows.iter().all(|row| row.norm_sk == q(1, 1)));
        assert!(r.satisfied() && r.bounds_hold);
    }

    #[test]
    fn square_of_shift_has_exact_residuals() {
        let b2 = OperatorSeries::new(e(2), WeightSeq::geometric(q(1, 2), q(1, 2)).unwrap());
        let y = SparseVec::from_pairs([(1, q(2, 1)), (3, q(-1, 3))]);
        let r = criterion_check(&b2, InverseSource::Exact, &e(5), &y, 6, 0.0).unwrap();
        assert!(r.rows.iter().all(|row| row.residual.is_zero()));
        // q = 5, p = 2: products vanish from k = 3 on
        assert!(r.rows[2..].iter().all(|row| row.product.is_zero()));
        assert!(!r.rows[1].product.is_zero());
    }

    #[test]
    fn first_basis_vector_is_annihilated() {
        let b = OperatorSeries::new(e(1), WeightSeq::constant_one());
        let r = criterion_check(&b, InverseSource::Exact, &e(1), &e(1), 4, 0.0).unwrap();
        assert!(r.rows.iter().all(|row| row.product.is_zero()));
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let b = OperatorSeries::new(e(1), WeightSeq::constant_one());
        let zero = OperatorSeries::new(SparseVec::<Rational>::zero(), WeightSeq::constant_one());
        assert_eq!(
            criterion_check(&zero, InverseSource::Exact, &e(1), &e(1), 2, 0.0),
            Err(Error::NullLimit)
        );
        assert!(criterion_check(&b, InverseSource::Exact, &SparseVec::zero(), &e(1), 2, 0.0).is_err());
    }

    #[test]
    fn shift_family_is_certified() {
        let fam = SeqFamily::constant(e(1), 16);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let params = ClosureParams {
            sample_count: 4,
            ..ClosureParams::default()
        };
        let rep = closure_supercyclic_verdict(&fam, &WeightSeq::constant_one(), &params, &mut rng).unwrap();
        assert_eq!(rep.verdict, Verdict::Satisfied);
        assert_eq!(rep.k0, Some(1));
        assert_eq!(rep.samples.len(), 4);
    }

    #[test]
    fn null_family_is_excluded() {
        let members = (1..=16).map(|m| SparseVec::from_dense(&[q(1, m)])).collect();
        let fam = SeqFamily::new(members, "vanishing");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let rep = closure_supercyclic_verdict(&fam, &WeightSeq::constant_one(), &ClosureParams::default(), &mut rng)
            .unwrap();
        assert_eq!(rep.verdict, Verdict::ExcludedNullLimit);
    }
}
