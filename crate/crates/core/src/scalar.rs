//! Scalar fields.
//!
//! Every algorithm in this crate is generic over [`Scalar`]. The arithmetic
//! mode of a run is chosen once by picking the concrete type: [`Rational`]
//! (exact, arbitrary precision), `f64`, or `Complex64`. Bounds that overflow
//! any fixed-width float are carried as a [`LogMagnitude`].

use core::cmp::Ordering;
use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

const LN_2: f64 = core::f64::consts::LN_2;

/// A scalar field element usable as a sequence coefficient.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// The real subfield; weights and norms live here.
    type Real: RealScalar;

    /// True when arithmetic never rounds.
    const EXACT: bool;

    /// Short mode label used in reports.
    const MODE: &'static str;

    fn from_real(r: Self::Real) -> Self;

    /// Absolute value (modulus for complex scalars).
    fn modulus(&self) -> Self::Real;

    fn log_magnitude(&self) -> LogMagnitude;

    /// Returns a scalar `t` minimising `Σ |t·a − b|` over the pairs `(a, b)`.
    ///
    /// Real fields return an exact minimiser; `tol` bounds the additive
    /// error of the objective for fields that need an iterative search.
    fn best_scale(pairs: &[(Self, Self)], tol: f64) -> Self;
}

/// Ordered real scalars.
pub trait RealScalar: Scalar<Real = Self> + PartialOrd {
    fn from_i64(v: i64) -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_i64(numer) / Self::from_i64(denom)
    }

    /// Exact conversion where possible; `None` for non-finite input.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Natural logarithm of `|self|`, `-inf` at zero. Never overflows.
    fn ln_abs(&self) -> f64;

    fn powu(&self, exp: u64) -> Self;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

/// Sign and natural log of the absolute value of a number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogMagnitude {
    /// -1, 0 or 1. Complex values report 1 when nonzero.
    pub sign: i8,
    /// `ln |x|`; `-inf` for zero.
    pub ln_abs: f64,
}

impl LogMagnitude {
    pub const ZERO: LogMagnitude = LogMagnitude {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogMagnitude = LogMagnitude {
        sign: 1,
        ln_abs: 0.0,
    };

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            LogMagnitude {
                sign: if v < 0.0 { -1 } else { 1 },
                ln_abs: libm::log(v.abs()),
            }
        }
    }

    pub fn positive(ln_abs: f64) -> Self {
        LogMagnitude { sign: 1, ln_abs }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn powi(self, exp: u64) -> Self {
        if exp == 0 {
            return Self::ONE;
        }
        LogMagnitude {
            sign: if self.sign < 0 && exp % 2 == 1 { -1 } else { self.sign.abs() },
            ln_abs: self.ln_abs * exp as f64,
        }
    }

    pub fn recip(self) -> Self {
        LogMagnitude {
            sign: self.sign,
            ln_abs: -self.ln_abs,
        }
    }

    /// Back to a float; saturates to 0 or infinity.
    pub fn to_f64(self) -> f64 {
        self.sign as f64 * libm::exp(self.ln_abs)
    }
}

impl Mul for LogMagnitude {
    type Output = LogMagnitude;
    fn mul(self, rhs: LogMagnitude) -> LogMagnitude {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogMagnitude {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs + rhs.ln_abs,
        }
    }
}

impl Div for LogMagnitude {
    type Output = LogMagnitude;
    fn div(self, rhs: LogMagnitude) -> LogMagnitude {
        let r = rhs.recip();
        self.mul(r)
    }
}

/// `ln |n|` for an arbitrarily large integer.
pub fn ln_abs_bigint(n: &BigInt) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 960 {
        return libm::log(n.abs().to_f64().unwrap_or(f64::INFINITY));
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> (shift as usize);
    libm::log(top.to_f64().unwrap_or(f64::INFINITY)) + shift as f64 * LN_2
}

impl Scalar for Rational {
    type Real = Rational;
    const EXACT: bool = true;
    const MODE: &'static str = "exact";

    fn from_real(r: Rational) -> Rational {
        r
    }

    fn modulus(&self) -> Rational {
        self.abs()
    }

    fn log_magnitude(&self) -> LogMagnitude {
        if self.is_zero() {
            return LogMagnitude::ZERO;
        }
        LogMagnitude {
            sign: if self.is_negative() { -1 } else { 1 },
            ln_abs: self.ln_abs(),
        }
    }

    fn best_scale(pairs: &[(Self, Self)], _tol: f64) -> Self {
        real_best_scale(pairs)
    }
}

impl RealScalar for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let sign = if self.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
        let ln = self.ln_abs();
        if ln.abs() < 700.0 {
            ToPrimitive::to_f64(self).unwrap_or(sign * libm::exp(ln))
        } else {
            sign * libm::exp(ln)
        }
    }

    fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_abs_bigint(self.numer()) - ln_abs_bigint(self.denom())
    }

    fn powu(&self, exp: u64) -> Self {
        Pow::pow(self, exp)
    }
}

impl Scalar for f64 {
    type Real = f64;
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn from_real(r: f64) -> f64 {
        r
    }

    fn modulus(&self) -> f64 {
        self.abs()
    }

    fn log_magnitude(&self) -> LogMagnitude {
        LogMagnitude::from_f64(*self)
    }

    fn best_scale(pairs: &[(Self, Self)], _tol: f64) -> Self {
        real_best_scale(pairs)
    }
}

impl RealScalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn ln_abs(&self) -> f64 {
        libm::log(self.abs())
    }

    fn powu(&self, exp: u64) -> Self {
        libm::pow(*self, exp as f64)
    }
}

impl Scalar for Complex64 {
    type Real = f64;
    const EXACT: bool = false;
    const MODE: &'static str = "complex-float";

    fn from_real(r: f64) -> Complex64 {
        Complex64::new(r, 0.0)
    }

    fn modulus(&self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    fn log_magnitude(&self) -> LogMagnitude {
        let m = self.modulus();
        if m == 0.0 {
            LogMagnitude::ZERO
        } else {
            LogMagnitude::positive(libm::log(m))
        }
    }

    fn best_scale(pairs: &[(Self, Self)], tol: f64) -> Self {
        complex_best_scale(pairs, tol)
    }
}

fn scaled_residual<S: Scalar>(pairs: &[(S, S)], t: &S) -> S::Real {
    pairs.iter().fold(S::Real::zero(), |acc, (a, b)| {
        acc + (t.clone() * a.clone() - b.clone()).modulus()
    })
}

/// Exact minimiser of the convex piecewise-linear map `t ↦ Σ |t·a − b|`.
///
/// The minimum sits on a breakpoint `b/a`; the breakpoints are bracketed
/// by sorting and the convex sequence of objective values is searched by
/// ternary refinement over the bracket.
fn real_best_scale<R: RealScalar>(pairs: &[(R, R)]) -> R {
    let mut breaks: alloc::vec::Vec<R> = pairs
        .iter()
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, b)| b.clone() / a.clone())
        .collect();
    if breaks.is_empty() {
        return R::zero();
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    breaks.dedup();

    let objective = |i: usize| scaled_residual(pairs, &breaks[i]);
    let (mut lo, mut hi) = (0usize, breaks.len() - 1);
    while hi - lo > 2 {
        let m1 = lo + (hi - lo) / 3;
        let m2 = hi - (hi - lo) / 3;
        if objective(m1) <= objective(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mut best = lo;
    let mut best_val = objective(lo);
    for i in lo + 1..=hi {
        let v = objective(i);
        if v < best_val {
            best = i;
            best_val = v;
        }
    }
    breaks.swap_remove(best)
}

fn ternary_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64) {
    let mut iters = 0;
    while hi - lo > width && iters < 200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
        iters += 1;
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Minimiser over the complex plane. The objective is convex and
/// `‖a‖₁`-Lipschitz in `t`, and any minimiser satisfies
/// `|t| ≤ 2‖b‖₁/‖a‖₁`. A coarse modulus–phase grid seeds the search box,
/// then nested ternary refinement (real part outside, imaginary part
/// inside) drives the objective within `tol` of the minimum.
fn complex_best_scale(pairs: &[(Complex64, Complex64)], tol: f64) -> Complex64 {
    let norm_a: f64 = pairs.iter().map(|(a, _)| a.modulus()).sum();
    let norm_b: f64 = pairs.iter().map(|(_, b)| b.modulus()).sum();
    if norm_a == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let f = |t: Complex64| -> f64 { pairs.iter().map(|(a, b)| (t * a - b).modulus()).sum() };
    let radius = 2.0 * norm_b / norm_a;

    let mut seed = Complex64::new(0.0, 0.0);
    let mut seed_val = f(seed);
    const RINGS: usize = 16;
    const SPOKES: usize = 32;
    for i in 1..=RINGS {
        let rho = radius * i as f64 / RINGS as f64;
        for j in 0..SPOKES {
            let phi = 2.0 * core::f64::consts::PI * j as f64 / SPOKES as f64;
            let t = Complex64::new(rho * libm::cos(phi), rho * libm::sin(phi));
            let v = f(t);
            if v < seed_val {
                seed = t;
                seed_val = v;
            }
        }
    }
    // The grid spacing bounds the distance from the seed to a minimiser.
    let cell = radius * (1.0 / RINGS as f64 + 2.0 * core::f64::consts::PI / SPOKES as f64);
    let half = cell.max(tol * radius).min(radius + cell);
    let width = (tol * norm_b.max(f64::MIN_POSITIVE) / norm_a).max(f64::EPSILON * radius);

    let inner = |re: f64| ternary_min(|im| f(Complex64::new(re, im)), seed.im - half, seed.im + half, width);
    let (re, _) = ternary_min(|re| inner(re).1, seed.re - half, seed.re + half, width);
    let (im, _) = inner(re);
    let t = Complex64::new(re, im);
    if f(t) <= seed_val {
        t
    } else {
        seed
    }
}

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7, nine terms).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = core::f64::consts::PI;
        return libm::log(pi / libm::sin(pi * x).abs()) - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * libm::log(2.0 * core::f64::consts::PI) + (x + 0.5) * libm::log(t) - t + libm::log(a)
}

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}
