use crate::scalar::RealScalar;
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind<R> {
    /// `w_n = 1`; the unweighted shift on ℓ₁.
    ConstantOne,
    /// `w_n = c·rⁿ` with `c > 0`, `0 < r < 1`.
    Geometric { c: R, r: R },
}

/// An admissible weight sequence: positive, strictly decreasing to zero and
/// summing to at most `C_X⁻¹ = 1`. The constant sequence is the unweighted
/// ℓ₁ special case and is exempt from summability.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSeq<R> {
    kind: WeightKind<R>,
    total: Option<R>,
}

impl<R: RealScalar> WeightSeq<R> {
    pub fn constant_one() -> Self {
        WeightSeq {
            kind: WeightKind::ConstantOne,
            total: None,
        }
    }

    pub fn geometric(c: R, r: R) -> Result<Self, Error> {
        if !c.is_positive() {
            return Err(Error::InvalidWeights("scale c must be positive"));
        }
        if !r.is_positive() || r >= R::one() {
            return Err(Error::InvalidWeights("ratio r must satisfy 0 < r < 1"));
        }
        let total = c.clone() * r.clone() / (R::one() - r.clone());
        if total > R::one() {
            return Err(Error::InvalidWeights("sum of weights exceeds 1"));
        }
        Ok(WeightSeq {
            kind: WeightKind::Geometric { c, r },
            total: Some(total),
        })
    }

    pub fn kind(&self) -> &WeightKind<R> {
        &self.kind
    }

    pub fn is_unweighted(&self) -> bool {
        matches!(self.kind, WeightKind::ConstantOne)
    }

    /// Whether `‖w‖₁ ≤ C_X⁻¹` for a biorthogonal system with constant `c_x`.
    pub fn admissible_for(&self, c_x: f64) -> bool {
        match &self.total {
            None => true,
            Some(t) => t.to_f64() * c_x <= 1.0 + 1e-15,
        }
    }

    /// `w_n`.
    pub fn weight(&self, n: usize) -> R {
        match &self.kind {
            WeightKind::ConstantOne => R::one(),
            WeightKind::Geometric { c, r } => c.clone() * r.powu(n as u64),
        }
    }

    pub fn ln_weight(&self, n: usize) -> f64 {
        match &self.kind {
            WeightKind::ConstantOne => 0.0,
            WeightKind::Geometric { c, r } => c.ln_abs() + n as f64 * r.ln_abs(),
        }
    }

    /// `Σ_n w_n`; `None` for the non-summable constant sequence.
    pub fn total_sum(&self) -> Option<R> {
        self.total.clone()
    }

    /// `Σ_{n>N} w_n` in closed form.
    pub fn tail_sum(&self, n: usize) -> Option<R> {
        match &self.kind {
            WeightKind::ConstantOne => None,
            WeightKind::Geometric { c, r } => {
                Some(c.clone() * r.powu(n as u64 + 1) / (R::one() - r.clone()))
            }
        }
    }

    /// `∏_{i=a}^{b} w_i`; the empty product (`a > b`) is 1.
    pub fn product(&self, a: usize, b: usize) -> R {
        if a > b {
            return R::one();
        }
        match &self.kind {
            WeightKind::ConstantOne => R::one(),
            WeightKind::Geometric { c, r } => {
                let len = (b - a + 1) as u64;
                let index_sum = (a + b) as u64 * len / 2;
                c.powu(len) * r.powu(index_sum)
            }
        }
    }

    /// `Σ_{i=a}^{b} ln w_i`.
    pub fn ln_product(&self, a: usize, b: usize) -> f64 {
        if a > b {
            return 0.0;
        }
        match &self.kind {
            WeightKind::ConstantOne => 0.0,
            WeightKind::Geometric { c, r } => {
                let len = (b - a + 1) as u64;
                let index_sum = (a + b) as u64 * len / 2;
                len as f64 * c.ln_abs() + index_sum as f64 * r.ln_abs()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn half() -> WeightSeq<Rational> {
        WeightSeq::geometric(q(1, 2), q(1, 2)).unwrap()
    }

    #[test]
    fn products() {
        assert_eq!(WeightSeq::<Rational>::constant_one().product(3, 9), q(1, 1));
        // w_n = 2^-(n+1)
        assert_eq!(half().product(1, 2), q(1, 32));
        assert_eq!(half().product(5, 4), q(1, 1));
        assert_eq!(half().weight(3), q(1, 16));
    }

    #[test]
    fn rejects_inadmissible_parameters() {
        assert!(WeightSeq::geometric(q(1, 1), q(2, 3)).is_err()); // sum 2
        assert!(WeightSeq::geometric(q(0, 1), q(1, 2)).is_err());
        assert!(WeightSeq::geometric(q(1, 2), q(1, 1)).is_err());
        assert!(WeightSeq::geometric(q(1, 1), q(1, 2)).is_ok()); // sum exactly 1
    }

    #[test]
    fn sums_close_exactly() {
        let w = WeightSeq::geometric(q(2, 3), q(3, 5)).unwrap();
        let total = w.total_sum().unwrap();
        assert_eq!(total, q(1, 1));
        let mut partial = q(0, 1);
        for n in 1..=100usize {
            assert!(w.weight(n + 1) < w.weight(n));
            partial += w.weight(n);
            assert_eq!(partial.clone() + w.tail_sum(n).unwrap(), total);
        }
    }
}
