use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn polydisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polydisc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn generate_then_run() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = polydisc(&[
            "generate",
            "positive-monomial",
            "--n",
            "3",
            "--caps",
            "4,4,4",
            "--terms",
            "2",
            "--seed",
            "7",
            "--out",
            path(out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let report = dir.path().join("report.json");
    let o = polydisc(&["run", path(&a), "--out", path(&report)]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = fs::read_to_string(&report).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["exit_code"], 0);
    assert!(v.get("wall_time_ms").is_none());
    assert!(v["prng"].as_str().unwrap().contains("ChaCha8"));

    let o = polydisc(&["run", path(&a), "--timing"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["wall_time_ms"].as_f64().is_some());
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"schema_version": 1, "name": "x", "n": 2, "caps": [3, 3], "checks": [], "colour": 1}"#,
    )
    .unwrap();
    let o = polydisc(&["run", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));

    let o = polydisc(&["run", path(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));

    let o = polydisc(&[
        "generate",
        "positive-monomial",
        "--n",
        "3",
        "--caps",
        "1,1,1",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("caps"));
}

#[test]
fn margin_override_can_empty_the_mask() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let o = polydisc(&[
        "generate",
        "adversarial",
        "--n",
        "2",
        "--caps",
        "4,4",
        "--seed",
        "3",
        "--out",
        path(&s),
    ]);
    assert!(o.status.success());
    let o = polydisc(&["run", path(&s), "--margin", "9,9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty mask"));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["outcomes"][0]["status"], "skipped");
}
