//! Scenario files: the JSON schema and its conversion into core objects.
//!
//! Complex numbers are `[re, im]` pairs. Explicit frames are row-major
//! (`dim` rows in basis order, one column per frame vector).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use polydisc_core::family::{ProjectionFamily, ThetaMultiplier};
use polydisc_core::inner::{Direction, InnerFunction1D, InnerFunctionProd, InnerSeq};
use polydisc_core::linalg::CMat;
use polydisc_core::space::{BoxTruncation, MultiIndex};
use polydisc_core::verify::{RudinSpec, VerifyOptions};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest box dimension a scenario may request.
pub const MAX_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Lemma21,
    Lemma31,
    Thm32a,
    Thm32b,
    Thm33,
    RemarkK,
    Thm41,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Lemma21 => "lemma21",
            CheckName::Lemma31 => "lemma31",
            CheckName::Thm32a => "thm32a",
            CheckName::Thm32b => "thm32b",
            CheckName::Thm33 => "thm33",
            CheckName::RemarkK => "remark_k",
            CheckName::Thm41 => "thm41",
        }
    }

    fn needs_theta(self) -> bool {
        !matches!(self, CheckName::Lemma31 | CheckName::Thm41)
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A zero `a` of multiplicity `mult`, written `[re, im, mult]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroSpec(pub f64, pub f64, pub usize);

fn unit_constant() -> [f64; 2] {
    [1.0, 0.0]
}

fn is_unit_constant(c: &[f64; 2]) -> bool {
    *c == unit_constant()
}

/// A rational inner function, or a coordinate product of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InnerSpec {
    /// `z^m`.
    Monomial(usize),
    /// `c * prod (z - a) / (1 - conj(a) z)`.
    Rational {
        #[serde(default = "unit_constant", skip_serializing_if = "is_unit_constant")]
        constant: [f64; 2],
        zeros: Vec<ZeroSpec>,
    },
    /// One factor per variable.
    Product(Vec<InnerSpec>),
}

impl InnerSpec {
    pub fn monomials(exponents: &[usize]) -> InnerSpec {
        InnerSpec::Product(exponents.iter().map(|&m| InnerSpec::Monomial(m)).collect())
    }

    pub fn one_variable(&self) -> Result<InnerFunction1D, ConfigError> {
        match self {
            InnerSpec::Monomial(m) => Ok(InnerFunction1D::monomial(*m)),
            InnerSpec::Rational { constant, zeros } => {
                let mut zs = Vec::new();
                for z in zeros {
                    zs.extend(std::iter::repeat_n(Complex64::new(z.0, z.1), z.2));
                }
                InnerFunction1D::new(Complex64::new(constant[0], constant[1]), zs)
                    .map_err(|e| ConfigError::field("inner function", e))
            }
            InnerSpec::Product(_) => Err(ConfigError::new(
                "inner function",
                "nested product where a one-variable function was expected",
            )),
        }
    }

    pub fn product(&self) -> Result<InnerFunctionProd, ConfigError> {
        match self {
            InnerSpec::Product(fs) => {
                let factors = fs
                    .iter()
                    .map(InnerSpec::one_variable)
                    .collect::<Result<_, _>>()?;
                InnerFunctionProd::new(factors).map_err(|e| ConfigError::field("inner function", e))
            }
            other => Ok(other.one_variable()?.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqSpec {
    pub direction: Direction,
    pub terms: Vec<InnerSpec>,
}

impl SeqSpec {
    pub fn build(&self, field: &str) -> Result<InnerSeq, ConfigError> {
        let terms = self
            .terms
            .iter()
            .map(InnerSpec::product)
            .collect::<Result<Vec<_>, _>>()?;
        InnerSeq::new(self.direction, terms)
            .validated()
            .map_err(|e| ConfigError::field(field, e))
    }
}

/// Row-major complex matrix.
pub type FrameSpec = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// The single projection `I`.
    Identity,
    /// Coordinate projections onto disjoint blocks of multi-indices.
    Partition(Vec<Vec<Vec<usize>>>),
    /// Differences of the principal subspaces of an increasing chain.
    InnerChain {
        terms: Vec<InnerSpec>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        reversed: bool,
    },
    /// Orthonormal frames of the ranges.
    Explicit(Vec<FrameSpec>),
}

impl FamilySpec {
    pub fn build(
        &self,
        space: &BoxTruncation,
        tau_rank: f64,
    ) -> Result<ProjectionFamily, ConfigError> {
        let err = |e| ConfigError::field("family", e);
        match self {
            FamilySpec::Identity => {
                ProjectionFamily::new(space, vec![polydisc_core::operators::Subspace::full(space)])
                    .map_err(err)
            }
            FamilySpec::Partition(blocks) => {
                let blocks: Vec<Vec<MultiIndex>> = blocks
                    .iter()
                    .map(|b| b.iter().map(|k| MultiIndex(k.clone())).collect())
                    .collect();
                for k in blocks.iter().flatten() {
                    if k.n() != space.n() {
                        return Err(ConfigError::new(
                            "family",
                            format!(
                                "index {:?} has {} entries, expected {}",
                                k.0,
                                k.n(),
                                space.n()
                            ),
                        ));
                    }
                }
                ProjectionFamily::from_partition(space, &blocks).map_err(err)
            }
            FamilySpec::InnerChain { terms, reversed } => {
                let seq = SeqSpec {
                    direction: Direction::Increasing,
                    terms: terms.clone(),
                }
                .build("family")?;
                let fam = ProjectionFamily::from_inner_chain(space, &seq, tau_rank).map_err(err)?;
                Ok(if *reversed { fam.reversed() } else { fam })
            }
            FamilySpec::Explicit(frames) => {
                let mut mats = Vec::with_capacity(frames.len());
                for f in frames {
                    let rows = f.len();
                    let cols = f.first().map_or(0, Vec::len);
                    if rows != space.dim() || f.iter().any(|r| r.len() != cols) {
                        return Err(ConfigError::new(
                            "family",
                            format!(
                                "explicit frame must have {} rows of equal length",
                                space.dim()
                            ),
                        ));
                    }
                    mats.push(CMat::from_fn(rows, cols, |i, j| {
                        Complex64::new(f[i][j][0], f[i][j][1])
                    }));
                }
                ProjectionFamily::explicit(space, mats).map_err(err)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_residual")]
    pub residual: f64,
    #[serde(default = "default_rank")]
    pub rank: f64,
}

fn default_residual() -> f64 {
    polydisc_core::operators::DEFAULT_TOL
}

fn default_rank() -> f64 {
    polydisc_core::operators::TAU_RANK
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: default_residual(),
            rank: default_rank(),
        }
    }
}

/// Rudin-type data: decreasing terms on `z_1`, increasing terms on the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RudinFile {
    pub first: Vec<InnerSpec>,
    pub rest: Vec<InnerSpec>,
}

impl RudinFile {
    fn build(&self, field: &str) -> Result<RudinSpec, ConfigError> {
        let first = SeqSpec {
            direction: Direction::Decreasing,
            terms: self.first.clone(),
        }
        .build(field)?;
        let rest = SeqSpec {
            direction: Direction::Increasing,
            terms: self.rest.clone(),
        }
        .build(field)?;
        Ok(RudinSpec { first, rest })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thm41File {
    pub s: RudinFile,
    pub s_tilde: RudinFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<InnerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_m: Option<usize>,
}

/// How a scenario was produced, when it came from the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub kind: String,
    pub prng: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub name: String,
    pub n: usize,
    pub caps: Vec<usize>,
    /// Variables carried by the inner terms; defaults to 1 with terms, else 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<SeqSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    pub checks: Vec<CheckName>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margins: Option<Vec<usize>>,
    /// Advisory truth values per check; mismatches only produce warnings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<BTreeMap<CheckName, bool>>,
    /// Candidate chain reproducing the subspace in the Rudin form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<SeqSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thm41: Option<Thm41File>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Effective Taylor degrees of the inner terms (Blaschke scenarios).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_orders: Option<Vec<usize>>,
}

/// A configuration problem, reported with the offending field.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }

    fn field(field: &str, e: impl fmt::Display) -> Self {
        ConfigError::new(field, e.to_string())
    }
}

/// A scenario converted into core objects.
#[derive(Debug, Clone)]
pub struct Built {
    pub space: BoxTruncation,
    pub first: Option<BoxTruncation>,
    pub family: Option<ProjectionFamily>,
    pub theta: Option<ThetaMultiplier>,
    pub witness: Option<InnerSeq>,
    pub thm41: Option<Thm41Built>,
    pub options: VerifyOptions,
}

#[derive(Debug, Clone)]
pub struct Thm41Built {
    pub s: RudinSpec,
    pub s_tilde: RudinSpec,
    pub eta: Option<InnerFunction1D>,
    pub max_m: usize,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::new("scenario", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    /// Variables carried by the inner terms.
    pub fn k(&self) -> usize {
        self.k.unwrap_or(if self.seq.is_some() { 1 } else { 0 })
    }

    pub fn build(&self) -> Result<Built, ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::new(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        if self.n < 2 {
            return Err(ConfigError::new("n", "at least two variables are required"));
        }
        if self.caps.len() != self.n {
            return Err(ConfigError::new(
                "caps",
                format!("{} caps given for n = {}", self.caps.len(), self.n),
            ));
        }
        let space =
            BoxTruncation::new(self.caps.clone()).map_err(|e| ConfigError::field("caps", e))?;
        if space.dim() > MAX_DIM {
            return Err(ConfigError::new(
                "caps",
                format!("box dimension {} exceeds {MAX_DIM}", space.dim()),
            ));
        }
        if self.generated.is_some() && self.seed.is_none() {
            return Err(ConfigError::new(
                "seed",
                "generated scenarios must record their seed",
            ));
        }
        if self.checks.is_empty() {
            return Err(ConfigError::new("checks", "no checks requested"));
        }
        let t = &self.tolerances;
        if !(t.residual > 0.0 && t.rank > 0.0 && t.residual.is_finite() && t.rank < 1.0) {
            return Err(ConfigError::new(
                "tolerances",
                "tolerances must be positive and finite",
            ));
        }
        if let Some(m) = &self.margins {
            if m.len() != self.n {
                return Err(ConfigError::new(
                    "margins",
                    format!("{} margins given for n = {}", m.len(), self.n),
                ));
            }
        }
        let options = VerifyOptions {
            tol: t.residual,
            tau_rank: t.rank,
            margins: self.margins.clone(),
        };

        let k = self.k();
        if k >= self.n {
            return Err(ConfigError::new(
                "k",
                format!("k = {k} leaves no family variables"),
            ));
        }
        if self.seq.is_some() && k == 0 {
            return Err(ConfigError::new("k", "inner terms need k >= 1"));
        }
        let (first, rest) = if k == 0 {
            (None, space.clone())
        } else {
            let (a, b) = space.split(k).map_err(|e| ConfigError::field("k", e))?;
            (Some(a), b)
        };

        let family = match &self.family {
            Some(f) => Some(f.build(&rest, t.rank)?),
            None => None,
        };
        let theta = match (&self.seq, &family) {
            (Some(seq), Some(fam)) => {
                let seq = seq.build("seq")?;
                if seq.nvars() != k {
                    return Err(ConfigError::new(
                        "seq",
                        format!("terms have {} variables, expected k = {k}", seq.nvars()),
                    ));
                }
                if seq.len() != fam.len() {
                    return Err(ConfigError::new(
                        "seq",
                        format!("{} terms for {} projections", seq.len(), fam.len()),
                    ));
                }
                Some(
                    ThetaMultiplier::new(seq, fam.clone())
                        .map_err(|e| ConfigError::field("seq", e))?,
                )
            }
            _ => None,
        };
        let witness = match &self.witness {
            Some(w) => Some(w.build("witness")?),
            None => None,
        };
        let thm41 = match &self.thm41 {
            Some(t41) => Some(Thm41Built {
                s: t41.s.build("thm41.s")?,
                s_tilde: t41.s_tilde.build("thm41.s_tilde")?,
                eta: t41.eta.as_ref().map(InnerSpec::one_variable).transpose()?,
                max_m: t41.max_m.unwrap_or(self.caps[0]),
            }),
            None => None,
        };

        for c in &self.checks {
            if c.needs_theta() && theta.is_none() {
                return Err(ConfigError::new(
                    "checks",
                    format!("{c} needs both seq and family"),
                ));
            }
            if *c == CheckName::Lemma31 && family.is_none() {
                return Err(ConfigError::new("checks", "lemma31 needs a family"));
            }
            if *c == CheckName::Thm41 && thm41.is_none() {
                return Err(ConfigError::new("checks", "thm41 needs the thm41 block"));
            }
        }

        Ok(Built {
            space,
            first,
            family,
            theta,
            witness,
            thm41,
            options,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> ScenarioFile {
        ScenarioFile::from_json(
            r#"{
                "schema_version": 1,
                "name": "worked",
                "n": 2,
                "caps": [5, 5],
                "seq": {"direction": "decreasing", "terms": [{"monomial": 2}, {"monomial": 1}]},
                "family": {"partition": [[[0]], [[1], [2], [3], [4], [5]]]},
                "checks": ["thm32a"]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn parses_and_builds() {
        let s = worked();
        assert_eq!(s.k(), 1);
        let b = s.build().unwrap();
        assert_eq!(b.theta.unwrap().family().len(), 2);
        assert_eq!(b.first.unwrap().caps(), &[5]);
    }

    #[test]
    fn round_trips_through_json() {
        let s = worked();
        assert_eq!(ScenarioFile::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn rejects_unknown_fields_and_checks() {
        let text = worked()
            .to_json()
            .replace("\"checks\"", "\"bogus\": 1, \"checks\"");
        assert!(ScenarioFile::from_json(&text).is_err());
        let text = worked().to_json().replace("\"thm32a\"", "\"thm99\"");
        assert!(ScenarioFile::from_json(&text).is_err());
    }

    #[test]
    fn rational_spec_with_multiplicity() {
        let spec: InnerSpec =
            serde_json::from_str(r#"{"rational": {"zeros": [[0.5, 0.0, 2]]}}"#).unwrap();
        let f = spec.one_variable().unwrap();
        assert_eq!(f.degree(), 2);
        let spec: InnerSpec =
            serde_json::from_str(r#"{"rational": {"zeros": [[1.5, 0.0, 1]]}}"#).unwrap();
        assert!(spec.one_variable().is_err());
    }

    #[test]
    fn configuration_errors_name_the_field() {
        let mut s = worked();
        s.family = Some(FamilySpec::Partition(vec![
            vec![vec![0]],
            vec![vec![0], vec![1]],
        ]));
        assert_eq!(s.build().unwrap_err().field, "family");

        let mut s = worked();
        s.seq.as_mut().unwrap().terms.push(InnerSpec::Monomial(0));
        assert_eq!(s.build().unwrap_err().field, "seq");

        let mut s = worked();
        s.generated = Some(Provenance {
            kind: "positive-monomial".into(),
            prng: "x".into(),
        });
        assert_eq!(s.build().unwrap_err().field, "seed");

        let mut s = worked();
        s.caps = vec![5];
        assert_eq!(s.build().unwrap_err().field, "caps");
    }
}
