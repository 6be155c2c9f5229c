//! Projective orbits `{t·Tᵏx : t ∈ 𝕂, k ≥ 0}`: a normalised distance from
//! the scaled orbit to a target, witness vectors for weighted shifts, orbit
//! traces and the confinement checks for the two non-supercyclic summands
//! of the backward shift.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::scalar::{RealScalar, Scalar};
use crate::shift::{apply_shift_pow, counterexample_a, counterexample_b, LinearMap};
use crate::space::{SparseVec, WeightSeq};
use crate::Error;

/// `min_t ‖t·x − y‖₁ / ‖y‖₁` with a minimising `t`.
///
/// Real fields are minimised exactly; complex fields within `tol`.
/// A zero `x` yields `(1, 0)`.
pub fn proj_distance<S: Scalar>(x: &SparseVec<S>, y: &SparseVec<S>, tol: f64) -> Result<(S::Real, S), Error> {
    if y.is_zero() {
        return Err(Error::ZeroVector("y"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::NonPositiveTolerance);
    }
    if x.is_zero() {
        return Ok((S::Real::one(), S::zero()));
    }
    let pairs = aligned_pairs(x, y);
    let t = S::best_scale(&pairs, tol);
    let residual = (&x.scaled(&t) - y).norm1();
    Ok((residual / y.norm1(), t))
}

/// `(x_n, y_n)` over the union of supports.
fn aligned_pairs<S: Scalar>(x: &SparseVec<S>, y: &SparseVec<S>) -> Vec<(S, S)> {
    let (xs, ys) = (x.entries(), y.entries());
    let mut out = Vec::with_capacity(xs.len() + ys.len());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() || j < ys.len() {
        let nx = xs.get(i).map_or(usize::MAX, |e| e.0);
        let ny = ys.get(j).map_or(usize::MAX, |e| e.0);
        if nx == ny {
            out.push((xs[i].1.clone(), ys[j].1.clone()));
            i += 1;
            j += 1;
        } else if nx < ny {
            out.push((xs[i].1.clone(), S::zero()));
            i += 1;
        } else {
            out.push((S::zero(), ys[j].1.clone()));
            j += 1;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessBlock<S: Scalar> {
    pub target_id: usize,
    /// The block occupies indices `start+1 ..= start+len`.
    pub start: usize,
    pub len: usize,
    /// Orbit power realising the target; equals `start`.
    pub power: usize,
    pub coeff: S,
    /// `‖z_j‖₁` of the unscaled block.
    pub block_norm: S::Real,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessPlan<S: Scalar> {
    pub blocks: Vec<WitnessBlock<S>>,
    pub eps: f64,
    pub weights: WeightSeq<S::Real>,
}

impl<S: Scalar> WitnessPlan<S> {
    /// Starts strictly increasing, ranges disjoint, coefficients nonzero,
    /// and `Σ_{i>j} c_i‖z_i‖ ≤ ε c_j ‖z_j‖` for every block `j`.
    pub fn is_consistent(&self) -> bool {
        let ordered = self
            .blocks
            .windows(2)
            .all(|b| b[0].start < b[1].start && b[0].start + b[0].len <= b[1].start);
        let nonzero = self.blocks.iter().all(|b| !b.coeff.is_zero());
        let eps = S::Real::from_f64(self.eps).unwrap_or_else(S::Real::zero);
        let mut tail = S::Real::zero();
        let mut budget_ok = true;
        for b in self.blocks.iter().rev() {
            let mass = b.coeff.modulus() * b.block_norm.clone();
            if tail > eps.clone() * mass.clone() {
                budget_ok = false;
            }
            tail = tail + mass;
        }
        ordered && nonzero && budget_ok
    }
}

/// Largest power of two not exceeding the positive value `v`.
fn pow2_floor<R: RealScalar>(v: &R) -> R {
    let two = R::from_i64(2);
    let mut e = libm::floor(v.ln_abs() / core::f64::consts::LN_2) as i64;
    let at = |e: i64| {
        if e >= 0 {
            two.powu(e as u64)
        } else {
            R::one() / two.powu(e.unsigned_abs())
        }
    };
    // correct for rounding in the logarithm
    while at(e) > *v {
        e -= 1;
    }
    while at(e + 1) <= *v {
        e += 1;
    }
    at(e)
}

/// A finitely supported `x` whose scaled `B_w`-orbit passes within `eps`
/// of every target.
///
/// Target `y_j` is stored at indices `s_j+1 ..= s_j+q_j` divided by the
/// weight products, so `B_w^{s_j}` maps the block back onto `y_j`. The
/// coefficients are powers of two chosen so that the later blocks add at
/// most `eps/2` of relative error at every earlier power.
pub fn build_witness<S: Scalar>(
    w: &WeightSeq<S::Real>,
    targets: &[SparseVec<S>],
    eps: f64,
) -> Result<(SparseVec<S>, WitnessPlan<S>), Error> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::NonPositiveTolerance);
    }
    if targets.iter().any(SparseVec::is_zero) {
        return Err(Error::ZeroVector("target"));
    }
    if !S::EXACT && !w.is_unweighted() {
        return Err(Error::ExactModeRequired);
    }
    let half_eps = S::Real::from_f64(eps / 2.0).ok_or(Error::NonPositiveTolerance)?;

    let mut blocks: Vec<WitnessBlock<S>> = Vec::with_capacity(targets.len());
    // β_i = (eps/2) c_i ‖y_i‖
    let mut betas: Vec<S::Real> = Vec::with_capacity(targets.len());
    let mut x = SparseVec::zero();
    let mut start = 0usize;
    for (id, y) in targets.iter().enumerate() {
        let len = y.degree();
        let block = SparseVec::from_pairs(
            y.iter()
                .map(|(n, v)| (start + n, v.clone() / S::from_real(w.product(*n, n + start - 1)))),
        );
        let block_norm = block.norm1();
        let coeff_real = match blocks.last() {
            None => S::Real::one(),
            Some(prev) => {
                let j = betas.len();
                let mut cap = prev.coeff.modulus();
                let mut halving = S::Real::one();
                for i in (0..j).rev() {
                    halving = halving / S::Real::from_i64(2);
                    let limit = betas[i].clone() * halving.clone() / block_norm.clone();
                    cap = S::Real::min_of(cap, limit);
                }
                pow2_floor(&cap)
            }
        };
        betas.push(half_eps.clone() * coeff_real.clone() * y.norm1());
        let coeff = S::from_real(coeff_real);
        x = x.add_scaled(&coeff, &block);
        blocks.push(WitnessBlock {
            target_id: id,
            start,
            len,
            power: start,
            coeff,
            block_norm,
        });
        start += len;
    }
    Ok((
        x,
        WitnessPlan {
            blocks,
            eps,
            weights: w.clone(),
        },
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRow<S: Scalar> {
    pub k: usize,
    pub target_id: usize,
    pub best_scale: S,
    pub proj_dist: S::Real,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitTrace<S: Scalar> {
    /// Sorted by `(target_id, k)`.
    pub rows: Vec<OrbitRow<S>>,
    /// Per target: `(k, distance)` of the closest orbit point.
    pub best: Vec<(usize, S::Real)>,
}

impl<S: Scalar> OrbitTrace<S> {
    pub fn max_best_distance(&self) -> Option<S::Real> {
        self.best
            .iter()
            .map(|(_, d)| d.clone())
            .reduce(S::Real::max_of)
    }
}

/// Projective distances of `Tᵏx` to every target for
/// `0 ≤ k ≤ min(kmax, maxSupport(x))`.
pub fn orbit_trace<S: Scalar, T: LinearMap<S> + ?Sized>(
    op: &T,
    x: &SparseVec<S>,
    targets: &[SparseVec<S>],
    kmax: usize,
    tol: f64,
) -> Result<OrbitTrace<S>, Error> {
    let top = kmax.min(x.max_support()?);
    let mut points = Vec::with_capacity(top + 1);
    let mut cur = x.clone();
    for k in 0..=top {
        if k > 0 {
            cur = op.apply(&cur);
        }
        points.push(cur.clone());
    }
    let mut rows = Vec::with_capacity(targets.len() * points.len());
    let mut best = Vec::with_capacity(targets.len());
    for (id, y) in targets.iter().enumerate() {
        let mut best_here: Option<(usize, S::Real)> = None;
        for (k, p) in points.iter().enumerate() {
            let (d, t) = proj_distance(p, y, tol)?;
            if best_here.as_ref().is_none_or(|(_, b)| d < *b) {
                best_here = Some((k, d.clone()));
            }
            rows.push(OrbitRow {
                k,
                target_id: id,
                best_scale: t,
                proj_dist: d,
            });
        }
        best.extend(best_here);
    }
    Ok(OrbitTrace { rows, best })
}

/// The witness contract re-verified on the shift orbit: returns the
/// distance at each block's power.
pub fn verify_witness<S: Scalar>(
    x: &SparseVec<S>,
    plan: &WitnessPlan<S>,
    targets: &[SparseVec<S>],
    tol: f64,
) -> Result<Vec<S::Real>, Error> {
    plan.blocks
        .iter()
        .map(|b| proj_distance(&apply_shift_pow(&plan.weights, x, b.power), &targets[b.target_id], tol).map(|r| r.0))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfinementRow<R> {
    pub k: usize,
    /// Variant A: first coordinate vanishes. Variant B: `Vᵏx ∈ span{e₁}`.
    pub confined: bool,
    /// Distance to `e₁` (variant A) or `e₂` (variant B).
    pub proj_dist: R,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfinementReport<R> {
    pub variant: Variant,
    pub rows: Vec<ConfinementRow<R>>,
    /// Every row confined with distance at least 1.
    pub certified: bool,
}

/// Checks that the orbit of `x` under one summand stays away from a fixed
/// direction for `k = 1..=kmax`.
pub fn confinement_check<S: Scalar>(
    variant: Variant,
    x: &SparseVec<S>,
    kmax: usize,
) -> Result<ConfinementReport<S::Real>, Error> {
    if x.is_zero() {
        return Err(Error::ZeroVector("x"));
    }
    let probe = match variant {
        Variant::A => SparseVec::basis(1),
        Variant::B => SparseVec::basis(2),
    };
    let mut rows = Vec::with_capacity(kmax);
    let mut cur = x.clone();
    for k in 1..=kmax {
        cur = match variant {
            Variant::A => counterexample_a(&cur),
            Variant::B => counterexample_b(&cur),
        };
        let confined = match variant {
            Variant::A => cur.coeff(1).is_zero(),
            Variant::B => cur.iter().all(|(n, _)| *n == 1),
        };
        let (d, _) = proj_distance(&cur, &probe, 1e-12)?;
        rows.push(ConfinementRow { k, confined, proj_dist: d });
    }
    let one = S::Real::one();
    let certified = rows.iter().all(|r| r.confined && r.proj_dist >= one);
    Ok(ConfinementReport {
        variant,
        rows,
        certified,
    })
}
