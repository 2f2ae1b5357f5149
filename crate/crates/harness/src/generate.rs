//! Seeded random scenarios.
//!
//! Monomial chains on the family variables are drawn as exponent vectors
//! `0 = a_1 < a_2 < ... < a_J` (componentwise, each step raising the total
//! degree), kept at most `cap - 1` per variable so every range is nonempty
//! and survives the unit interior margin.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polydisc_core::inner::DEFAULT_TAIL_EPS;
use polydisc_core::inner::{Direction, InnerFunction1D};
use polydisc_core::space::BoxTruncation;

use crate::scenario::{
    CheckName, ConfigError, FamilySpec, InnerSpec, Provenance, ScenarioFile, SeqSpec, Tolerances,
    ZeroSpec, SCHEMA_VERSION,
};

/// Name and version of the pseudo-random generator, recorded in scenarios.
pub const PRNG: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

/// Largest zero modulus drawn for Blaschke terms.
pub const MAX_ZERO_MODULUS: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    /// Nested monomial chains: every condition holds.
    PositiveMonomial,
    /// Blaschke terms with |a| <= 0.6 over a monomial chain family.
    PositiveBlaschke,
    /// Invariant but not doubly commuting tail (n >= 3); a non-invariant tail for n = 2.
    Adversarial,
    /// A tail that escapes under some shift.
    NonInvariant,
}

impl GenKind {
    pub const ALL: [GenKind; 4] = [
        GenKind::PositiveMonomial,
        GenKind::PositiveBlaschke,
        GenKind::Adversarial,
        GenKind::NonInvariant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GenKind::PositiveMonomial => "positive-monomial",
            GenKind::PositiveBlaschke => "positive-blaschke",
            GenKind::Adversarial => "adversarial",
            GenKind::NonInvariant => "non-invariant",
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GenKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown kind {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub kind: GenKind,
    pub n: usize,
    pub caps: Vec<usize>,
    /// Number of inner terms (and projections).
    pub terms: usize,
    pub seed: u64,
    /// Use increasing terms paired with head spaces.
    pub increasing: bool,
}

fn err(field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::new(field, msg)
}

/// Strictly monotone chain of exponent vectors starting at `start`, each
/// step adding at least one unit, all entries at most `cap - 1`.
fn monomial_chain(
    rng: &mut ChaCha8Rng,
    caps: &[usize],
    start: Vec<usize>,
    steps: usize,
) -> Option<Vec<Vec<usize>>> {
    let room = |a: &[usize]| -> usize {
        a.iter()
            .zip(caps)
            .map(|(&x, &c)| c.saturating_sub(1).saturating_sub(x))
            .sum()
    };
    let mut chain = vec![start];
    for step in 0..steps {
        let mut a = chain.last().expect("non-empty").clone();
        let left = steps - step - 1;
        let spare = room(&a).checked_sub(left + 1)?;
        let units = 1 + rng.random_range(0..=spare.min(1));
        for _ in 0..units {
            let open: Vec<usize> = (0..a.len()).filter(|&i| a[i] + 1 < caps[i]).collect();
            let i = open[rng.random_range(0..open.len())];
            a[i] += 1;
        }
        chain.push(a);
    }
    Some(chain)
}

fn dominates(k: &[usize], a: &[usize]) -> bool {
    k.iter().zip(a).all(|(x, y)| x >= y)
}

/// Coordinate blocks `{k >= a_j} \ {k >= a_{j+1}}` of a monomial chain.
fn chain_blocks(space: &BoxTruncation, chain: &[Vec<usize>]) -> Vec<Vec<Vec<usize>>> {
    let basis = space.enumerate_basis();
    (0..chain.len())
        .map(|j| {
            basis
                .iter()
                .filter(|k| {
                    dominates(&k.0, &chain[j])
                        && chain.get(j + 1).is_none_or(|next| !dominates(&k.0, next))
                })
                .map(|k| k.0.clone())
                .collect()
        })
        .collect()
}

fn seq_degrees(rng: &mut ChaCha8Rng, cap: usize, terms: usize, increasing: bool) -> Vec<usize> {
    let mut d: Vec<usize> = sample(rng, cap, terms).into_vec();
    d.sort_unstable();
    if !increasing {
        d.reverse();
    }
    d
}

fn random_zero(rng: &mut ChaCha8Rng) -> ZeroSpec {
    let r = MAX_ZERO_MODULUS * rng.random::<f64>().sqrt();
    let t = std::f64::consts::TAU * rng.random::<f64>();
    let round = |x: f64| (x * 1000.0).round() / 1000.0;
    ZeroSpec(round(r * t.cos()), round(r * t.sin()), 1)
}

/// Blaschke terms with the given degrees, nested so that the sequence
/// divides in the required direction.
fn blaschke_terms(rng: &mut ChaCha8Rng, degrees: &[usize]) -> Vec<InnerSpec> {
    // build from the smallest degree upward, reusing earlier zeros
    let mut order: Vec<usize> = (0..degrees.len()).collect();
    order.sort_by_key(|&j| degrees[j]);
    let mut zeros: Vec<ZeroSpec> = Vec::new();
    let mut out = vec![InnerSpec::Monomial(0); degrees.len()];
    for j in order {
        while zeros.len() < degrees[j] {
            zeros.push(random_zero(rng));
        }
        out[j] = InnerSpec::Rational {
            constant: [1.0, 0.0],
            zeros: zeros.clone(),
        };
    }
    out
}

fn monomial_terms(degrees: &[usize]) -> Vec<InnerSpec> {
    degrees.iter().map(|&d| InnerSpec::Monomial(d)).collect()
}

pub fn generate(p: &GenParams) -> Result<ScenarioFile, ConfigError> {
    if p.n < 2 {
        return Err(err("n", "at least two variables are required"));
    }
    if p.caps.len() != p.n {
        return Err(err(
            "caps",
            format!("{} caps given for n = {}", p.caps.len(), p.n),
        ));
    }
    if p.terms == 0 {
        return Err(err("terms", "at least one term is required"));
    }
    if matches!(p.kind, GenKind::Adversarial | GenKind::NonInvariant) && p.terms < 2 {
        return Err(err("terms", "this kind needs at least two terms"));
    }
    if p.caps[0] < p.terms {
        return Err(err(
            "caps",
            format!(
                "cap {} of z1 cannot hold {} distinct degrees",
                p.caps[0], p.terms
            ),
        ));
    }
    let rest_caps = p.caps[1..].to_vec();
    let rest = BoxTruncation::new(rest_caps.clone()).map_err(|e| err("caps", e.to_string()))?;
    let m = rest.n();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let too_small = || err("caps", "caps too small for the requested chain");

    let degrees = seq_degrees(&mut rng, p.caps[0], p.terms, p.increasing);
    let direction = if p.increasing {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    let mut terms = monomial_terms(&degrees);
    let mut truncation_orders = None;
    let mut witness = None;
    let mut checks;
    let mut expected = std::collections::BTreeMap::new();
    let (thm_a, thm_b) = if p.increasing {
        (CheckName::Thm33, CheckName::Thm33)
    } else {
        (CheckName::Thm32a, CheckName::Thm32b)
    };

    let family = match p.kind {
        GenKind::PositiveMonomial | GenKind::PositiveBlaschke => {
            let chain = monomial_chain(&mut rng, &rest_caps, vec![0; m], p.terms - 1)
                .ok_or_else(too_small)?;
            if p.kind == GenKind::PositiveBlaschke {
                terms = blaschke_terms(&mut rng, &degrees);
                let orders = terms
                    .iter()
                    .map(|t| {
                        t.one_variable()
                            .map(|f: InnerFunction1D| f.effective_degree(DEFAULT_TAIL_EPS))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                truncation_orders = Some(orders);
            }
            let chain_terms: Vec<InnerSpec> =
                chain.iter().map(|a| InnerSpec::monomials(a)).collect();
            let mut w = chain_terms.clone();
            if p.increasing {
                w.reverse();
            }
            witness = Some(SeqSpec {
                direction: if p.increasing {
                    Direction::Decreasing
                } else {
                    Direction::Increasing
                },
                terms: w,
            });
            checks = vec![thm_a];
            // the isometry interior needs the full Taylor support inside the z1 cap
            let fits = truncation_orders
                .as_ref()
                .is_none_or(|o: &Vec<usize>| o.iter().all(|&d| d < p.caps[0]));
            if fits {
                checks.insert(0, CheckName::Lemma21);
            }
            if thm_b != thm_a {
                checks.push(thm_b);
            }
            if !p.increasing {
                checks.insert(checks.len() - 2, CheckName::Lemma31);
                expected.insert(CheckName::Lemma31, true);
            }
            expected.insert(thm_a, true);
            expected.insert(thm_b, true);
            FamilySpec::InnerChain {
                terms: chain_terms,
                reversed: p.increasing,
            }
        }
        GenKind::Adversarial if m >= 2 => {
            let mut start = vec![0; m];
            start[0] = 1;
            start[1] = 1;
            if rest_caps[0] < 2 || rest_caps[1] < 2 {
                return Err(too_small());
            }
            let tail = monomial_chain(&mut rng, &rest_caps, start, p.terms.saturating_sub(3))
                .ok_or_else(too_small)?;
            let mut blocks = vec![vec![vec![0; m]]];
            if p.terms == 2 {
                blocks.push(
                    rest.enumerate_basis()
                        .into_iter()
                        .map(|k| k.0)
                        .filter(|k| k.iter().any(|&x| x > 0))
                        .collect(),
                );
            } else {
                let tails = chain_blocks(&rest, &tail);
                let first_tail: Vec<Vec<usize>> = rest
                    .enumerate_basis()
                    .into_iter()
                    .map(|k| k.0)
                    .filter(|k| k.iter().any(|&x| x > 0) && !dominates(k, &tail[0]))
                    .collect();
                blocks.push(first_tail);
                blocks.extend(tails);
            }
            if p.increasing {
                blocks.reverse();
            }
            checks = if p.increasing {
                vec![CheckName::Thm33]
            } else {
                vec![CheckName::Lemma31, CheckName::Thm32a, CheckName::Thm32b]
            };
            if !p.increasing {
                expected.insert(CheckName::Lemma31, false);
                expected.insert(CheckName::Thm32a, true);
                expected.insert(CheckName::Thm32b, false);
            }
            FamilySpec::Partition(blocks)
        }
        GenKind::Adversarial | GenKind::NonInvariant => {
            // a nonzero index split off from an otherwise positive chain
            if rest_caps.iter().all(|&c| c < 2) {
                return Err(too_small());
            }
            let chain = monomial_chain(&mut rng, &rest_caps, vec![0; m], p.terms - 2)
                .ok_or_else(too_small)?;
            let mut alpha = vec![0; m];
            while alpha.iter().all(|&x| x == 0) {
                for (a, &c) in alpha.iter_mut().zip(&rest_caps) {
                    *a = rng.random_range(0..c.max(1));
                }
            }
            let mut blocks = vec![vec![alpha.clone()]];
            for mut b in chain_blocks(&rest, &chain) {
                b.retain(|k| *k != alpha);
                blocks.push(b);
            }
            if blocks.iter().any(Vec::is_empty) {
                return Err(too_small());
            }
            if p.increasing {
                blocks.reverse();
            }
            checks = vec![thm_a];
            if thm_b != thm_a {
                checks.push(thm_b);
            }
            expected.insert(thm_a, false);
            FamilySpec::Partition(blocks)
        }
    };

    let mut name = format!("{}-n{}-j{}-seed{}", p.kind, p.n, p.terms, p.seed);
    if p.increasing {
        name.push_str("-increasing");
    }
    Ok(ScenarioFile {
        schema_version: SCHEMA_VERSION,
        name,
        n: p.n,
        caps: p.caps.clone(),
        k: None,
        seq: Some(SeqSpec { direction, terms }),
        family: Some(family),
        checks,
        tolerances: Tolerances::default(),
        margins: None,
        expected: Some(expected),
        witness,
        thm41: None,
        generated: Some(Provenance {
            kind: p.kind.to_string(),
            prng: PRNG.into(),
        }),
        seed: Some(p.seed),
        truncation_orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kind: GenKind, n: usize, seed: u64) -> GenParams {
        GenParams {
            kind,
            n,
            caps: vec![4; n],
            terms: 2,
            seed,
            increasing: false,
        }
    }

    #[test]
    fn deterministic_under_seed() {
        for kind in GenKind::ALL {
            let a = generate(&params(kind, 3, 7)).unwrap().to_json();
            let b = generate(&params(kind, 3, 7)).unwrap().to_json();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn generated_scenarios_build() {
        for kind in GenKind::ALL {
            for n in [2, 3] {
                for seed in 0..5 {
                    for increasing in [false, true] {
                        let mut p = params(kind, n, seed);
                        p.terms = 3;
                        p.increasing = increasing;
                        let s = generate(&p).unwrap();
                        s.build().unwrap_or_else(|e| panic!("{}: {e}", s.name));
                    }
                }
            }
        }
    }

    #[test]
    fn caps_too_small() {
        let mut p = params(GenKind::PositiveMonomial, 3, 1);
        p.caps = vec![1, 1, 1];
        assert_eq!(generate(&p).unwrap_err().field, "caps");
        let mut p = params(GenKind::PositiveMonomial, 2, 1);
        p.caps = vec![4, 2];
        p.terms = 4;
        assert_eq!(generate(&p).unwrap_err().field, "caps");
    }

    #[test]
    fn kinds_parse() {
        for k in GenKind::ALL {
            assert_eq!(k.as_str().parse::<GenKind>().unwrap(), k);
        }
        assert!("bogus".parse::<GenKind>().is_err());
    }
}
