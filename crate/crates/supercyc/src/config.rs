//! The run configuration: one JSON document, every field optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use sha2::{Digest, Sha256};
use supercyc_core::criterion::XInfSampler;
use supercyc_core::{Rational, SparseVec, WeightSeq};

use crate::num::{convert, fraction_string, rational_from_json, sparse_from_json, sparse_to_json, ModeScalar};
use crate::ConfigError;

/// An exact rational read from a JSON number or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        s.serialize_str(&fraction_string(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        rational_from_json(&v).map(Q).map_err(serde::de::Error::custom)
    }
}

/// A finitely supported vector in any accepted JSON layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(pub SparseVec<Rational>);

impl Serialize for Vector {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        sparse_to_json(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        sparse_from_json(&v).map(Vector).map_err(serde::de::Error::custom)
    }
}

fn vector(pairs: &[(usize, i64, i64)]) -> Vector {
    Vector(SparseVec::from_pairs(
        pairs.iter().map(|&(n, a, b)| (n, Rational::new(a.into(), b.into()))),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    ConstantOne,
    Geometric { c: Q, r: Q },
}

impl WeightSpec {
    pub fn build<S: ModeScalar>(&self) -> Result<WeightSeq<S>, ConfigError> {
        match self {
            WeightSpec::ConstantOne => Ok(WeightSeq::constant_one()),
            WeightSpec::Geometric { c, r } => {
                // admissibility is decided exactly, then the mode's copy is built
                WeightSeq::geometric(c.0.clone(), r.0.clone()).map_err(|e| ConfigError::Invalid(e.to_string()))?;
                WeightSeq::geometric(S::from_rational(&c.0), S::from_rational(&r.0)).map_err(|e| {
                    ConfigError::Invalid(format!("{e} after rounding to the selected mode"))
                })
            }
        }
    }

    pub fn exact(&self) -> Result<WeightSeq<Rational>, ConfigError> {
        self.build::<Rational>()
    }

    pub fn geometric(c: (i64, i64), r: (i64, i64)) -> Self {
        WeightSpec::Geometric {
            c: Q(Rational::new(c.0.into(), c.1.into())),
            r: Q(Rational::new(r.0.into(), r.1.into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub max_index: usize,
    pub max_nnz: usize,
    pub height: i64,
}

impl SamplerSpec {
    pub fn sampler(&self) -> XInfSampler {
        XInfSampler {
            max_index: self.max_index,
            max_nnz: self.max_nnz,
            height: self.height,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `λᵐ = λ`.
    Constant { lambda: Vector, len: usize },
    /// `λᵐ = λ + v/m` for `m < switch`, then `λ`.
    EventuallyConstant {
        lambda: Vector,
        perturbation: Vector,
        switch: usize,
        len: usize,
    },
    /// `λᵐ = λ + v/m` with the closed-form limit `λ`.
    Harmonic { lambda: Vector, perturbation: Vector, len: usize },
    /// `λᵐ = v/m`, whose limit is zero.
    Null { perturbation: Vector, len: usize },
    /// Members listed verbatim, optionally with their limit.
    Explicit {
        members: Vec<Vector>,
        #[serde(default)]
        limit: Option<Vector>,
    },
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec::Constant {
            lambda: vector(&[(1, 1, 1)]),
            len: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinationSpec {
    pub lambda1: Vector,
    pub lambda2: Vector,
    pub pairs: usize,
    /// Coefficients `a/b` with `0 < |a| ≤ height`, `1 ≤ b ≤ height`.
    pub height: i64,
    pub len: usize,
}

impl Default for CombinationSpec {
    fn default() -> Self {
        CombinationSpec {
            lambda1: vector(&[(1, 1, 1), (3, 1, 2)]),
            lambda2: vector(&[(2, 1, 1), (4, -1, 3)]),
            pairs: 10,
            height: 5,
            len: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaConfig {
    pub samples: usize,
    /// Largest power in the sampled `λ`.
    pub max_support: usize,
    pub max_nnz: usize,
    pub max_dim: usize,
    pub height: i64,
    pub oracle_samples: usize,
    pub oracle_dim: usize,
    pub det_dim: usize,
    pub iter_k: usize,
    pub monotone_sets: usize,
    pub monotone_dmax: usize,
    /// Weight sequences drawn per instance.
    pub weight_pool: Vec<WeightSpec>,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig {
            samples: 200,
            max_support: 6,
            max_nnz: 4,
            max_dim: 10,
            height: 6,
            oracle_samples: 50,
            oracle_dim: 7,
            det_dim: 6,
            iter_k: 5,
            monotone_sets: 50,
            monotone_dmax: 30,
            weight_pool: vec![
                WeightSpec::ConstantOne,
                WeightSpec::geometric((1, 2), (1, 2)),
                WeightSpec::geometric((1, 3), (2, 3)),
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriterionConfig {
    pub family: FamilySpec,
    pub kmax: usize,
    pub samples: usize,
    pub probes: usize,
    pub sampler: SamplerSpec,
    /// Runs the linear-combination demonstration instead of `family`.
    pub combination: Option<CombinationSpec>,
}

impl Default for CriterionConfig {
    fn default() -> Self {
        CriterionConfig {
            family: FamilySpec::default(),
            kmax: 6,
            samples: 20,
            probes: 20,
            sampler: SamplerSpec {
                max_index: 6,
                max_nnz: 3,
                height: 4,
            },
            combination: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub count: usize,
    pub height: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessConfig {
    pub targets: Option<Vec<Vector>>,
    pub targets_file: Option<PathBuf>,
    /// Seeded random targets used when no explicit list is given.
    pub grid: GridSpec,
    pub eps: f64,
    pub kmax: Option<usize>,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            targets: None,
            targets_file: None,
            grid: GridSpec {
                dim: 3,
                count: 20,
                height: 3,
            },
            eps: 0.01,
            kmax: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsometryConfig {
    pub samples: usize,
    pub max_support: usize,
    pub max_nnz: usize,
    pub height: i64,
    /// Extra fixed sequences checked before the random ones.
    pub lambdas: Vec<Vector>,
}

impl Default for IsometryConfig {
    fn default() -> Self {
        IsometryConfig {
            samples: 100,
            max_support: 12,
            max_nnz: 6,
            height: 9,
            lambdas: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative residual allowed in float mode.
    pub float_residual: f64,
    /// Cauchy tolerance for limit detection in float mode; exact mode
    /// demands exact stabilisation.
    pub convergence: f64,
    /// Additive accuracy of projective distances.
    pub proj: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            float_residual: 1e-9,
            convergence: 1e-8,
            proj: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: u64,
    pub weights: WeightSpec,
    pub c_x: f64,
    pub lemmas: LemmaConfig,
    pub criterion: CriterionConfig,
    pub witness: WitnessConfig,
    pub isometry: IsometryConfig,
    pub tolerances: Tolerances,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Exact,
            seed: 0,
            weights: WeightSpec::ConstantOne,
            c_x: 1.0,
            lemmas: LemmaConfig::default(),
            criterion: CriterionConfig::default(),
            witness: WitnessConfig::default(),
            isometry: IsometryConfig::default(),
            tolerances: Tolerances::default(),
            out: PathBuf::from("out"),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("{name} must be a finite positive number, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("tolerances.float_residual", self.tolerances.float_residual)?;
        positive("tolerances.convergence", self.tolerances.convergence)?;
        positive("tolerances.proj", self.tolerances.proj)?;
        positive("witness.eps", self.witness.eps)?;
        if !(self.c_x.is_finite() && self.c_x >= 1.0) {
            return Err(ConfigError::Invalid(format!("c_x must be at least 1, got {}", self.c_x)));
        }
        let w = self.weights.exact()?;
        if !w.admissible_for(self.c_x) {
            return Err(ConfigError::Invalid("weights sum exceeds 1/c_x".into()));
        }
        for spec in &self.lemmas.weight_pool {
            spec.exact()?;
        }
        if self.lemmas.weight_pool.is_empty() {
            return Err(ConfigError::Invalid("lemmas.weight_pool is empty".into()));
        }
        let l = &self.lemmas;
        if l.max_support == 0 || l.max_dim == 0 || l.max_nnz == 0 || l.height < 1 || l.iter_k == 0 {
            return Err(ConfigError::Invalid("lemma sizes must be positive".into()));
        }
        let c = &self.criterion;
        if c.kmax == 0 || c.sampler.max_index == 0 || c.sampler.max_nnz == 0 || c.sampler.height < 1 {
            return Err(ConfigError::Invalid("criterion sizes must be positive".into()));
        }
        let i = &self.isometry;
        if i.max_support == 0 || i.max_nnz == 0 || i.height < 1 {
            return Err(ConfigError::Invalid("isometry sizes must be positive".into()));
        }
        let g = &self.witness.grid;
        if g.dim == 0 || g.height < 1 {
            return Err(ConfigError::Invalid("witness grid sizes must be positive".into()));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form, ignoring the output path.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serialises");
        if let Value::Object(map) = &mut v {
            map.remove("out");
        }
        hex::encode(Sha256::digest(v.to_string().as_bytes()))
    }

    /// The tolerance used when deciding convergence and vanishing.
    pub fn decision_tol(&self) -> f64 {
        match self.mode {
            Mode::Exact => 0.0,
            Mode::Float => self.tolerances.convergence,
        }
    }
}

/// Converts a rational vector to the run's scalar type.
pub fn to_mode<S: ModeScalar>(v: &Vector) -> SparseVec<S> {
    convert(&v.0)
}
