use std::path::PathBuf;
use std::process::Command;

use qrke_lab::harness::{run_experiment, ExperimentSpec, Named, Outcome};

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.txt"))
}

/// Compare against the stored structured output; `UPDATE_GOLDEN=1` rewrites it.
fn golden(named: Named) {
    let report = run_experiment(&ExperimentSpec::named(named)).unwrap();
    let got = report.render_structured(false);
    let path = golden_path(named.name());
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e} (run with UPDATE_GOLDEN=1)", path.display()));
    assert_eq!(got, want, "{} drifted from its golden output", named.name());
    assert_eq!(report.outcome(), Outcome::Reproduced);
}

#[test]
fn golden_sec3_diophantine() {
    golden(Named::Sec3Diophantine);
}

#[test]
fn golden_sec3_contfrac() {
    golden(Named::Sec3Contfrac);
}

#[test]
fn golden_sec5_int_sieve() {
    golden(Named::Sec5IntSieve);
}

#[test]
fn golden_kex_demo() {
    golden(Named::KexDemo);
}

#[test]
fn runs_are_reproducible() {
    for named in [Named::Sec3Contfrac, Named::KexDemo] {
        let a = run_experiment(&ExperimentSpec::named(named)).unwrap();
        let b = run_experiment(&ExperimentSpec::named(named)).unwrap();
        assert_eq!(a.render_structured(false), b.render_structured(false));
    }
}

fn qrke(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qrke-lab"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn reproduce_exits_zero_and_renders_both_formats() {
    let (code, text, _) = qrke(&["reproduce", "--experiment", "sec3-diophantine"]);
    assert_eq!(code, 0);
    assert!(text.contains("window_width") && text.contains("143"));
    let (code, structured, _) = qrke(&[
        "reproduce",
        "--experiment",
        "sec3-diophantine",
        "--format",
        "structured",
    ]);
    assert_eq!(code, 0);
    for line in structured.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["schema_version"], 1);
    }
    assert!(structured.contains("\"record\":\"timing\""));
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, err) = qrke(&["reproduce", "--experiment", "nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown experiment"));
    let (code, _, _) = qrke(&["attack", "sieve", "--x", "0.3"]);
    assert_eq!(code, 2);
}

#[test]
fn domain_errors_exit_two() {
    let (code, _, err) = qrke(&[
        "attack",
        "contfrac",
        "--x",
        "1.5",
        "--tr",
        "0.2",
        "--r-range",
        "10:20",
        "--digits",
        "40",
    ]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn failed_attack_exits_one() {
    let (code, out, _) = qrke(&[
        "attack",
        "contfrac",
        "--x",
        "0.3",
        "--tr",
        "0.123456789",
        "--r-range",
        "1e8:1e9",
        "--digits",
        "40",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("no-recovery"));
}

#[test]
fn successful_attack_exits_zero() {
    let (code, out, _) = qrke(&[
        "kex",
        "--x",
        "0.3",
        "--r-range",
        "1e4:1e5",
        "--digits",
        "60",
        "--r",
        "31337",
        "--insecure-export-secrets",
        "--format",
        "structured",
    ]);
    assert_eq!(code, 0);
    let public = out
        .lines()
        .find(|l| l.contains("\"alice\""))
        .and_then(|l| l.split("y=").nth(1))
        .map(|s| s.split([' ', '"']).next().unwrap().to_string())
        .expect("alice public value");
    let (code, out, _) = qrke(&[
        "attack",
        "sieve",
        "--x",
        "0.3",
        "--tr",
        &public,
        "--r-range",
        "1e4:1e5",
        "--digits",
        "40",
        "--match-digits",
        "12",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("31337"));
}

#[test]
fn secrets_need_the_export_flag() {
    let args = [
        "kex",
        "--x",
        "0.3",
        "--r-range",
        "1e4:1e5",
        "--digits",
        "60",
        "--seed",
        "5",
    ];
    let (_, hidden, _) = qrke(&args);
    let mut with_flag = args.to_vec();
    with_flag.push("--insecure-export-secrets");
    let (_, shown, _) = qrke(&with_flag);
    assert!(!hidden.contains("r="));
    assert!(shown.contains("r="));
}
