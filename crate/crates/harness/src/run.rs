//! Executes the checks of a scenario and assembles the report.

use std::time::Instant;

use serde::Serialize;

use polydisc_core::family::ThetaMultiplier;
use polydisc_core::space::BoxTruncation;
use polydisc_core::verify::{
    check_lemma21, check_lemma31, check_remark_k, check_thm32a, check_thm32b, check_thm33a,
    check_thm33b, check_thm41, Outcome, VerifyOptions,
};
use polydisc_core::Error;

use crate::scenario::{Built, CheckName, ConfigError, ScenarioFile};

pub const ARTIFACT: &str = concat!("polydisc ", env!("CARGO_PKG_VERSION"));

/// Every verdict is consistent.
pub const EXIT_OK: i32 = 0;
/// Some equivalence class disagreed or an identity failed.
pub const EXIT_INCONSISTENT: i32 = 1;
/// The scenario could not be evaluated as written.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub artifact: String,
    pub scenario: ScenarioFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prng: Option<String>,
    pub outcomes: Vec<Outcome>,
    pub warnings: Vec<String>,
    pub consistent: bool,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub tol: Option<f64>,
    pub margins: Option<Vec<usize>>,
    /// Record wall time; reports are then no longer byte-reproducible.
    pub timing: bool,
}

fn skip_for(check: &str, e: &Error) -> Outcome {
    let reason = match e {
        Error::EmptyMask => "empty mask".to_string(),
        other => format!("configuration error: {other}"),
    };
    Outcome::Skipped {
        check: check.into(),
        reason,
        residuals: Vec::new(),
    }
}

fn execute(
    check: CheckName,
    built: &Built,
    opts: &VerifyOptions,
) -> Vec<(String, polydisc_core::Result<Outcome>)> {
    let theta = built.theta.as_ref();
    let first = built.first.as_ref();
    let with_theta =
        |f: &dyn Fn(&ThetaMultiplier, &BoxTruncation) -> polydisc_core::Result<Outcome>| {
            f(theta.expect("validated"), first.expect("validated"))
        };
    match check {
        CheckName::Lemma21 => vec![(
            "lemma21".into(),
            with_theta(&|t, b| check_lemma21(t, b, opts)),
        )],
        CheckName::Lemma31 => {
            let fam = built.family.as_ref().expect("validated");
            // margins are given on the full box; the family sits on the last variables
            let k = built.space.n() - fam.space().n();
            let o = VerifyOptions {
                margins: opts.margins.as_ref().map(|m| m[k..].to_vec()),
                ..opts.clone()
            };
            vec![("lemma31".into(), check_lemma31(fam, &o))]
        }
        CheckName::Thm32a => vec![(
            "thm32a".into(),
            with_theta(&|t, b| check_thm32a(t, b, opts)),
        )],
        CheckName::Thm32b => vec![(
            "thm32b".into(),
            with_theta(&|t, b| check_thm32b(t, b, built.witness.as_ref(), opts)),
        )],
        CheckName::Thm33 => vec![
            (
                "thm33a".into(),
                with_theta(&|t, b| check_thm33a(t, b, opts)),
            ),
            (
                "thm33b".into(),
                with_theta(&|t, b| check_thm33b(t, b, built.witness.as_ref(), opts)),
            ),
        ],
        CheckName::RemarkK => vec![(
            "remark_k".into(),
            with_theta(&|t, b| check_remark_k(t, b, opts)),
        )],
        CheckName::Thm41 => {
            let t = built.thm41.as_ref().expect("validated");
            vec![(
                "thm41".into(),
                check_thm41(
                    &t.s,
                    &t.s_tilde,
                    &built.space,
                    t.eta.as_ref(),
                    t.max_m,
                    opts,
                ),
            )]
        }
    }
}

/// Runs every listed check. Configuration problems inside a check become
/// reported skips and set exit code 2.
pub fn run_scenario(scenario: &ScenarioFile, ro: &RunOptions) -> Result<Report, ConfigError> {
    let start = Instant::now();
    let mut scenario = scenario.clone();
    if let Some(t) = ro.tol {
        scenario.tolerances.residual = t;
    }
    if let Some(m) = &ro.margins {
        scenario.margins = Some(m.clone());
    }
    let built = scenario.build()?;
    let mut outcomes = Vec::new();
    let mut config_error = false;
    for &check in &scenario.checks {
        for (name, result) in execute(check, &built, &built.options) {
            match result {
                Ok(o) => outcomes.push(o),
                Err(e) => {
                    config_error = true;
                    outcomes.push(skip_for(&name, &e));
                }
            }
        }
    }

    let mut warnings = Vec::new();
    if let Some(expected) = &scenario.expected {
        for (check, want) in expected {
            let got: Vec<Option<bool>> = outcomes
                .iter()
                .filter_map(Outcome::verdict)
                .filter(|v| v.check.starts_with(check.as_str()))
                .map(|v| v.common_value())
                .collect();
            if got.is_empty() {
                warnings.push(format!(
                    "expected value for {check} but no verdict was produced"
                ));
            }
            for g in got {
                if g != Some(*want) {
                    warnings.push(format!(
                        "expected {check} to be {want}, computed {}",
                        g.map_or("undetermined".to_string(), |b| b.to_string())
                    ));
                }
            }
        }
    }

    let consistent = outcomes.iter().all(Outcome::is_consistent);
    let exit_code = if config_error {
        EXIT_CONFIG
    } else if !consistent {
        EXIT_INCONSISTENT
    } else {
        EXIT_OK
    };
    let prng = scenario.generated.as_ref().map(|g| g.prng.clone());
    Ok(Report {
        artifact: ARTIFACT.into(),
        scenario,
        prng,
        outcomes,
        warnings,
        consistent,
        exit_code,
        wall_time_ms: ro.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

/// One-line diagnostic naming the first failing check and its residual.
pub fn diagnostic(report: &Report) -> Option<String> {
    report.outcomes.iter().find_map(|o| match o {
        Outcome::Skipped { check, reason, .. } if !reason.starts_with("hypothesis failed") => {
            Some(format!("{check}: {reason}"))
        }
        Outcome::Verdict(v) if !v.consistent => {
            let worst = v
                .residuals
                .iter()
                .max_by(|a, b| a.value.total_cmp(&b.value))
                .map(|r| format!(" (largest residual {} = {:e})", r.label, r.value))
                .unwrap_or_default();
            Some(format!(
                "{}: inconsistent: {}{worst}",
                v.check,
                v.notes.join("; ")
            ))
        }
        _ => None,
    })
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
                "checks": ["lemma21", "thm32a", "thm32b"],
                "expected": {"thm32a": true}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn worked_instance_exits_zero() {
        let r = run_scenario(&worked(), &RunOptions::default()).unwrap();
        assert_eq!(r.exit_code, EXIT_OK, "{}", r.to_json());
        assert!(r.warnings.is_empty());
        assert_eq!(r.outcomes.len(), 3);
    }

    #[test]
    fn mislabeled_expectation_is_only_a_warning() {
        let mut s = worked();
        s.expected
            .as_mut()
            .unwrap()
            .insert(CheckName::Thm32a, false);
        let r = run_scenario(&s, &RunOptions::default()).unwrap();
        assert_eq!(r.exit_code, EXIT_OK);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn empty_mask_is_reported_and_exits_two() {
        let r = run_scenario(
            &worked(),
            &RunOptions {
                margins: Some(vec![9, 0]),
                ..RunOptions::default()
            },
        )
        .unwrap();
        assert_eq!(r.exit_code, EXIT_CONFIG);
        assert!(r.outcomes.iter().any(|o| matches!(
            o,
            Outcome::Skipped { reason, .. } if reason == "empty mask"
        )));
        assert!(diagnostic(&r).unwrap().contains("empty mask"));
    }

    #[test]
    fn timing_is_opt_in() {
        let r = run_scenario(&worked(), &RunOptions::default()).unwrap();
        assert!(!r.to_json().contains("wall_time_ms"));
        let r = run_scenario(
            &worked(),
            &RunOptions {
                timing: true,
                ..RunOptions::default()
            },
        )
        .unwrap();
        assert!(r.wall_time_ms.is_some());
    }
}
