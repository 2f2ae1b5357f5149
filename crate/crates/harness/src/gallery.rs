//! Curated scenarios: worked instances, their negatives, Blaschke and
//! unitary-equivalence cases, plus a few seeded generator outputs.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use polydisc_core::inner::Direction;

use crate::generate::{generate, GenKind, GenParams};
use crate::run::{run_scenario, Report, RunOptions};
use crate::scenario::{
    CheckName, FamilySpec, InnerSpec, RudinFile, ScenarioFile, SeqSpec, Thm41File, Tolerances,
    ZeroSpec, SCHEMA_VERSION,
};

fn base(name: &str, caps: &[usize], checks: &[CheckName]) -> ScenarioFile {
    ScenarioFile {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        n: caps.len(),
        caps: caps.to_vec(),
        k: None,
        seq: None,
        family: None,
        checks: checks.to_vec(),
        tolerances: Tolerances::default(),
        margins: None,
        expected: None,
        witness: None,
        thm41: None,
        generated: None,
        seed: None,
        truncation_orders: None,
    }
}

fn mono(direction: Direction, degrees: &[usize]) -> SeqSpec {
    SeqSpec {
        direction,
        terms: degrees.iter().map(|&d| InnerSpec::Monomial(d)).collect(),
    }
}

fn products(direction: Direction, exps: &[&[usize]]) -> SeqSpec {
    SeqSpec {
        direction,
        terms: exps.iter().map(|e| InnerSpec::monomials(e)).collect(),
    }
}

/// Two blocks: the listed indices, then everything else in the box.
fn split(caps: &[usize], first: &[&[usize]]) -> FamilySpec {
    let a: Vec<Vec<usize>> = first.iter().map(|k| k.to_vec()).collect();
    let space = polydisc_core::space::BoxTruncation::new(caps.to_vec()).expect("valid caps");
    let b: Vec<Vec<usize>> = space
        .enumerate_basis()
        .into_iter()
        .map(|k| k.0)
        .filter(|k| !a.contains(k))
        .collect();
    FamilySpec::Partition(vec![a, b])
}

fn expect(pairs: &[(CheckName, bool)]) -> Option<BTreeMap<CheckName, bool>> {
    Some(pairs.iter().copied().collect())
}

fn chain(exps: &[&[usize]]) -> FamilySpec {
    FamilySpec::InnerChain {
        terms: exps.iter().map(|e| InnerSpec::monomials(e)).collect(),
        reversed: false,
    }
}

fn rudin(first: &[usize], rest: &[&[usize]]) -> RudinFile {
    RudinFile {
        first: first.iter().map(|&d| InnerSpec::Monomial(d)).collect(),
        rest: rest.iter().map(|e| InnerSpec::monomials(e)).collect(),
    }
}

/// The bundled scenarios, in a fixed order.
pub fn gallery() -> Vec<ScenarioFile> {
    use CheckName::*;
    use Direction::{Decreasing, Increasing};
    let mut out = Vec::new();

    let mut s = base("thm32-worked", &[5, 5], &[Lemma21, Thm32a, Thm32b]);
    s.seq = Some(mono(Decreasing, &[2, 1]));
    s.family = Some(split(&[5], &[&[0]]));
    s.expected = expect(&[(Thm32a, true), (Thm32b, true)]);
    out.push(s);

    let mut s = base("thm32-negative", &[5, 5], &[Thm32a, Thm32b]);
    s.seq = Some(mono(Decreasing, &[2, 1]));
    s.family = Some(split(&[5], &[&[1]]));
    s.expected = expect(&[(Thm32a, false)]);
    out.push(s);

    let mut s = base("thm32-trivial", &[3, 3], &[Lemma21, Thm32a, Thm32b]);
    s.seq = Some(mono(Decreasing, &[0]));
    s.family = Some(FamilySpec::Identity);
    s.expected = expect(&[(Thm32a, true), (Thm32b, true)]);
    out.push(s);

    let mut s = base("lemma31-chain-n2", &[4, 4], &[Lemma31]);
    s.family = Some(chain(&[&[1, 0]]));
    s.expected = expect(&[(Lemma31, true)]);
    out.push(s);

    let mut s = base("lemma31-nonprincipal-n2", &[5, 5], &[Lemma31]);
    s.family = Some(split(&[5, 5], &[&[0, 0]]));
    s.expected = expect(&[(Lemma31, false)]);
    out.push(s);

    let mut s = base("lemma31-chain-n3", &[3, 3, 3], &[Lemma31]);
    s.family = Some(chain(&[&[1, 1, 0]]));
    s.expected = expect(&[(Lemma31, true)]);
    out.push(s);

    let mut s = base("thm32b-positive-n3", &[4, 4, 4], &[Lemma31, Thm32a, Thm32b]);
    s.seq = Some(mono(Decreasing, &[2, 1]));
    s.family = Some(chain(&[&[0, 0], &[1, 1]]));
    s.witness = Some(products(Increasing, &[&[0, 0], &[1, 1]]));
    s.expected = expect(&[(Lemma31, true), (Thm32a, true), (Thm32b, true)]);
    out.push(s);

    let mut s = base("thm32b-positive-n3-extracted", &[4, 4, 4], &[Thm32b]);
    s.seq = Some(mono(Decreasing, &[2, 1]));
    s.family = Some(chain(&[&[0, 0], &[1, 1]]));
    s.expected = expect(&[(Thm32b, true)]);
    out.push(s);

    let mut s = base(
        "thm32b-adversarial-n3",
        &[4, 4, 4],
        &[Lemma31, Thm32a, Thm32b],
    );
    s.seq = Some(mono(Decreasing, &[2, 1]));
    s.family = Some(split(&[4, 4], &[&[0, 0]]));
    s.expected = expect(&[(Lemma31, false), (Thm32a, true), (Thm32b, false)]);
    out.push(s);

    let mut s = base("thm33-worked", &[4, 4], &[Thm33]);
    s.seq = Some(mono(Increasing, &[1, 2]));
    let upper: Vec<Vec<usize>> = (1..=4).map(|k| vec![k]).collect();
    s.family = Some(FamilySpec::Partition(vec![upper, vec![vec![0]]]));
    s.expected = expect(&[(Thm33, true)]);
    out.push(s);

    let mut s = base("thm33-trivial", &[3, 3], &[Thm33]);
    s.seq = Some(mono(Increasing, &[1]));
    s.family = Some(FamilySpec::Identity);
    s.expected = expect(&[(Thm33, true)]);
    out.push(s);

    let mut s = base("thm33-negative", &[4, 4], &[Thm33]);
    s.seq = Some(mono(Increasing, &[1, 2]));
    let rest: Vec<Vec<usize>> = [0, 2, 3, 4].iter().map(|&k| vec![k]).collect();
    s.family = Some(FamilySpec::Partition(vec![rest, vec![vec![1]]]));
    s.expected = expect(&[(Thm33, false)]);
    out.push(s);

    let mut s = base("remark-k2-trivial", &[3, 3, 3], &[RemarkK]);
    s.k = Some(2);
    s.seq = Some(products(Decreasing, &[&[1, 1]]));
    s.family = Some(FamilySpec::Identity);
    s.expected = expect(&[(RemarkK, true)]);
    out.push(s);

    let mut s = base("remark-k2-positive", &[3, 3, 3], &[Lemma21, RemarkK]);
    s.k = Some(2);
    s.seq = Some(products(Decreasing, &[&[1, 2], &[1, 1]]));
    s.family = Some(split(&[3], &[&[0]]));
    s.expected = expect(&[(RemarkK, true)]);
    out.push(s);

    let mut s = base("remark-k2-negative", &[3, 3, 3], &[RemarkK]);
    s.k = Some(2);
    s.seq = Some(products(Decreasing, &[&[1, 2], &[1, 1]]));
    s.family = Some(split(&[3], &[&[1]]));
    s.expected = expect(&[(RemarkK, false)]);
    out.push(s);

    let mut s = base("blaschke-isometry", &[12, 1], &[Lemma21, Thm32a]);
    s.seq = Some(SeqSpec {
        direction: Decreasing,
        terms: vec![InnerSpec::Rational {
            constant: [1.0, 0.0],
            zeros: vec![ZeroSpec(0.5, 0.0, 1)],
        }],
    });
    s.family = Some(FamilySpec::Identity);
    s.margins = Some(vec![10, 0]);
    s.truncation_orders = Some(vec![10]);
    s.expected = expect(&[(Lemma21, true), (Thm32a, true)]);
    out.push(s);

    let mut s = base("blaschke-chain-n2", &[30, 4], &[Lemma21, Thm32a, Thm32b]);
    s.seq = Some(SeqSpec {
        direction: Decreasing,
        terms: vec![
            InnerSpec::Rational {
                constant: [0.0, 1.0],
                zeros: vec![ZeroSpec(0.3, -0.2, 1), ZeroSpec(-0.5, 0.1, 1)],
            },
            InnerSpec::Rational {
                constant: [1.0, 0.0],
                zeros: vec![ZeroSpec(-0.5, 0.1, 1)],
            },
        ],
    });
    s.family = Some(chain(&[&[0], &[2]]));
    s.expected = expect(&[(Thm32a, true), (Thm32b, true)]);
    out.push(s);

    let st = rudin(&[2, 1], &[&[0], &[1]]);
    let mut s = base("thm41-eta-given", &[6, 4], &[Thm41]);
    s.thm41 = Some(Thm41File {
        s: rudin(&[3, 2], &[&[0], &[1]]),
        s_tilde: st.clone(),
        eta: Some(InnerSpec::Monomial(1)),
        max_m: None,
    });
    s.expected = expect(&[(Thm41, true)]);
    out.push(s);

    let mut s = base("thm41-search", &[6, 4], &[Thm41]);
    s.thm41 = Some(Thm41File {
        s: rudin(&[4, 3], &[&[0], &[1]]),
        s_tilde: st.clone(),
        eta: None,
        max_m: Some(3),
    });
    s.expected = expect(&[(Thm41, true)]);
    out.push(s);

    let mut s = base("thm41-identity", &[6, 4], &[Thm41]);
    s.thm41 = Some(Thm41File {
        s: st.clone(),
        s_tilde: st.clone(),
        eta: None,
        max_m: Some(3),
    });
    s.expected = expect(&[(Thm41, true)]);
    out.push(s);

    let mut s = base("thm41-inconclusive", &[6, 4], &[Thm41]);
    s.thm41 = Some(Thm41File {
        s: st,
        s_tilde: rudin(&[2, 1], &[&[0], &[2]]),
        eta: None,
        max_m: Some(6),
    });
    out.push(s);

    for (kind, n, caps) in [
        (GenKind::PositiveMonomial, 3, vec![4, 4, 4]),
        (GenKind::Adversarial, 3, vec![4, 4, 4]),
        (GenKind::PositiveBlaschke, 2, vec![6, 5]),
    ] {
        out.push(
            generate(&GenParams {
                kind,
                n,
                caps,
                terms: 2,
                seed: 7,
                increasing: false,
            })
            .expect("gallery parameters are valid"),
        );
    }
    out
}

/// Runs the gallery, writing `<name>.scenario.json` and `<name>.report.json`
/// into `out_dir`. Returns the reports in gallery order.
pub fn write_gallery(out_dir: &Path) -> io::Result<Vec<Report>> {
    fs::create_dir_all(out_dir)?;
    let mut reports = Vec::new();
    for s in gallery() {
        let report = run_scenario(&s, &RunOptions::default())
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        fs::write(
            out_dir.join(format!("{}.scenario.json", s.name)),
            s.to_json(),
        )?;
        fs::write(
            out_dir.join(format!("{}.report.json", s.name)),
            report.to_json(),
        )?;
        reports.push(report);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let g = gallery();
        let mut names: Vec<&str> = g.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), g.len());
        assert!(g.len() >= 10);
    }
}
