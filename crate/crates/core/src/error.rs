use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// `min_support`/`max_support` of the zero vector.
    UndefinedSupportExtremum,
    /// An operation needs `p_λ` but `λ = 0`.
    NullLambda,
    /// `maxSupport(y) > d` for a right inverse on `X_d`.
    SupportExceedsDimension { support: usize, dim: usize },
    /// The cofactor oracle is factorial in `d`.
    OracleSizeLimit { dim: usize, max: usize },
    InvalidWeights(&'static str),
    InvalidSystemConstant,
    NonPositiveDelta,
    /// `sup |λ_{k₀}ʲ|` below δ in a bound evaluation.
    InconsistentSup,
    MismatchedWeights,
    /// A tail series must start after the finite coefficients.
    InvalidTail,
    FamilyTooShort { len: usize, min: usize },
    /// All coordinate limits vanish, so `U = 0`.
    NullLimit,
    /// The `k₀` coordinate has no nonzero tail in the finite family.
    DegenerateTail { k0: usize },
    /// No admissible `m_k` within the family for step `k`.
    InsufficientConvergenceDepth { k: usize, log_gap: f64 },
    ZeroVector(&'static str),
    NonPositiveTolerance,
    ExactModeRequired,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UndefinedSupportExtremum => write!(f, "undefined support extremum of the zero vector"),
            Error::NullLambda => write!(f, "p_lambda undefined: lambda is the zero sequence"),
            Error::SupportExceedsDimension { support, dim } => {
                write!(f, "vector support {support} exceeds dimension {dim}")
            }
            Error::OracleSizeLimit { dim, max } => {
                write!(f, "oracle size limit: dimension {dim} exceeds {max}")
            }
            Error::InvalidWeights(why) => write!(f, "inadmissible weights: {why}"),
            Error::InvalidSystemConstant => write!(f, "system constant C_X must be finite and at least 1"),
            Error::NonPositiveDelta => write!(f, "delta must be strictly positive"),
            Error::InconsistentSup => write!(f, "supremum at offset 0 is below delta"),
            Error::MismatchedWeights => write!(f, "operator series use different weights"),
            Error::InvalidTail => write!(f, "analytic tail must start after the finite coefficients and have |ratio| < 1"),
            Error::FamilyTooShort { len, min } => {
                write!(f, "family has {len} members, at least {min} required")
            }
            Error::NullLimit => {
                write!(f, "limit operator is null; supercyclicity claim excludes U = 0")
            }
            Error::DegenerateTail { k0 } => {
                write!(f, "coordinate {k0} vanishes at the end of the family")
            }
            Error::InsufficientConvergenceDepth { k, log_gap } => write!(
                f,
                "insufficient convergence depth at k = {k} (log-gap {log_gap:.6})"
            ),
            Error::ZeroVector(what) => write!(f, "{what} must be nonzero"),
            Error::NonPositiveTolerance => write!(f, "strictly positive tolerance required"),
            Error::ExactModeRequired => write!(f, "exact mode required for weighted witnesses"),
        }
    }
}

impl core::error::Error for Error {}
