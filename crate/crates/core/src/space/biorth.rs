use crate::scalar::Scalar;
use crate::space::SparseVec;
use crate::Error;

/// The canonical biorthogonal system `(e_n, e_n*)` of ℓ₁.
///
/// `c_x` is `sup ‖x_n*‖`. It is 1 for the canonical system; a larger value
/// can be configured to evaluate bounds as they read for a general space,
/// but vectors are always represented in ℓ₁ coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiorthSystem {
    c_x: f64,
}

impl Default for BiorthSystem {
    fn default() -> Self {
        Self::canonical()
    }
}

impl BiorthSystem {
    pub fn canonical() -> Self {
        BiorthSystem { c_x: 1.0 }
    }

    /// A system constant for bound evaluation; must be at least 1.
    pub fn with_constant(c_x: f64) -> Result<Self, Error> {
        if c_x.is_nan() || c_x < 1.0 || !c_x.is_finite() {
            return Err(Error::InvalidSystemConstant);
        }
        Ok(BiorthSystem { c_x })
    }

    pub fn c_x(&self) -> f64 {
        self.c_x
    }

    /// `x_n`.
    pub fn vector<S: Scalar>(&self, n: usize) -> SparseVec<S> {
        SparseVec::basis(n)
    }

    /// `x_m*(x)`.
    pub fn functional<S: Scalar>(&self, m: usize, x: &SparseVec<S>) -> S {
        x.coeff(m)
    }
}
