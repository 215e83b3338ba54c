use std::process::Command;

use interp_lab::harness::{list_suites, run_suite, ExperimentConfig, Status};
use interp_lab::Error;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_interp-lab"))
}

#[test]
fn registry_is_stable() {
    let names: Vec<&str> = list_suites().iter().map(|s| s.name).collect();
    assert_eq!(
        names,
        [
            "polarization",
            "lemma-expansion",
            "riesz-thorin",
            "calderon-crosscheck",
            "parseval",
            "vallee-poussin",
            "lemma3",
            "lions-peetre",
            "truncation-chain",
            "later-transfer",
            "radius-bound",
            "mho",
            "three-lines"
        ]
    );
    assert_eq!(names, list_suites().iter().map(|s| s.name).collect::<Vec<_>>());
}

#[test]
fn unknown_suite_is_a_validation_error() {
    match run_suite(&ExperimentConfig::new("no-such-suite", 0)) {
        Err(Error::Config(fields)) => assert!(fields[0].starts_with("suite")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn polarization_default_passes_and_is_reproducible() {
    let cfg = ExperimentConfig { population: Some(50), ..ExperimentConfig::new("polarization", 5) };
    let a = run_suite(&cfg).unwrap();
    assert!(a.ok());
    assert!(a.records.iter().all(|r| r.status == Status::Pass));
    let b = run_suite(&cfg).unwrap();
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    let other = run_suite(&ExperimentConfig { seed: 6, ..cfg }).unwrap();
    assert_ne!(a.to_csv().unwrap(), other.to_csv().unwrap());
}

#[test]
fn report_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { population: Some(20), ..ExperimentConfig::new("parseval", 2) };
    let report = run_suite(&cfg).unwrap();
    let (json, csv) = report.write(dir.path()).unwrap();
    let back: interp_lab::harness::SuiteReport = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(back, report);
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("suite,check,lhs,rhs,tolerance,margin,status,inputs_digest\n"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn exit_codes_follow_gating_records() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");

    std::fs::write(&config, r#"{"suite":"radius-bound","seed":3,"population":10}"#).unwrap();
    let ok =
        bin().args(["run", "radius-bound", "--config"]).arg(&config).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(ok.code(), Some(0));

    // the decay clause of the truncation chain fails at this size
    std::fs::write(&config, r#"{"suite":"truncation-chain","seed":3,"max_dim":3,"thetas":[0.5]}"#).unwrap();
    let bad =
        bin().args(["run", "truncation-chain", "--config"]).arg(&config).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));

    std::fs::write(&config, r#"{"suite":"parseval","seed":3,"population":0,"samples":12}"#).unwrap();
    let invalid = bin().args(["run", "parseval", "--config"]).arg(&config).output().unwrap();
    assert_eq!(invalid.status.code(), Some(2));
    let err = String::from_utf8_lossy(&invalid.stderr);
    assert!(err.contains("population") && err.contains("samples"), "{err}");
}

#[test]
fn cli_verbs() {
    let list = bin().arg("list").output().unwrap();
    assert_eq!(String::from_utf8_lossy(&list.stdout).lines().count(), 13);

    let couple = r#"{"space0":{"dim":1,"p":2,"weights":[1]},"space1":{"dim":1,"p":2,"weights":[9]}}"#;
    let out = bin()
        .args(["norm", "--couple", couple, "--theta", "0.5", "--x", "[[1,0]]", "--mode", "closed"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["upper"].as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-12);

    let out =
        bin().args(["decompose", "--couple", couple, "--theta", "0.5", "--t", "1", "--x", "[[1,0]]"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = bin().args(["peetre", "--couple", couple, "--theta", "0.5", "--x", "[[1,0]]"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["lower"].as_f64().unwrap() <= v["upper"].as_f64().unwrap());
}
