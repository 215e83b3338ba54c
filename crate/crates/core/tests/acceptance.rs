//! The thirteen acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use interp_lab::harness::{run_suite, ExperimentConfig, Status, SuiteReport};

const SEED: u64 = 1;

struct Outcome {
    passed: bool,
    detail: String,
}

fn timed(suite: &str, limit_secs: u64) -> (SuiteReport, Duration, bool) {
    let start = Instant::now();
    let report = run_suite(&ExperimentConfig::new(suite, SEED)).expect("suite runs");
    let elapsed = start.elapsed();
    (report, elapsed, elapsed <= Duration::from_secs(limit_secs))
}

fn suite_gate(suite: &str, limit_secs: u64, extra: impl Fn(&SuiteReport) -> bool) -> Outcome {
    let (report, elapsed, in_time) = timed(suite, limit_secs);
    let passed = report.ok() && in_time && extra(&report);
    let mut detail = format!(
        "{suite}: {} pass, {} fail, {} heuristic, {elapsed:.1?} (limit {limit_secs}s)",
        report.passed, report.failed, report.heuristic
    );
    for r in report.failures().take(3) {
        detail.push_str(&format!("; {} lhs={:.4e} rhs={:.4e}", r.check, r.lhs, r.rhs));
    }
    Outcome { passed, detail }
}

fn inequality_only() -> Outcome {
    let (report, elapsed, in_time) = timed("three-lines", 60);
    let rows: Vec<_> = report.records.iter().filter(|r| r.check.ends_with(",inequality")).collect();
    let worst = rows.iter().map(|r| r.lhs).fold(0.0, f64::max);
    let passed = in_time && !rows.is_empty() && rows.iter().all(|r| r.status == Status::Pass);
    Outcome { passed, detail: format!("{} couples, worst implied C {worst:.12}, {elapsed:.1?}", rows.len()) }
}

fn determinism() -> Outcome {
    let mut same = true;
    let mut names = Vec::new();
    for suite in ["parseval", "lions-peetre", "mho"] {
        let cfg = ExperimentConfig::new(suite, SEED);
        let a = run_suite(&cfg).unwrap().to_csv().unwrap();
        let b = run_suite(&cfg).unwrap().to_csv().unwrap();
        same &= a == b;
        names.push(format!("{suite} ({} bytes)", a.len()));
    }
    Outcome { passed: same, detail: format!("byte-identical CSV on rerun: {}", names.join(", ")) }
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);
    let criteria: Vec<Criterion> = vec![
        ("polarization identity", Box::new(|| suite_gate("polarization", 60, |_| true))),
        ("multilinear expansion", Box::new(|| suite_gate("lemma-expansion", 60, |_| true))),
        ("Riesz-Thorin", Box::new(|| suite_gate("riesz-thorin", 120, |r| r.heuristic == 0))),
        ("Calderon cross-check", Box::new(|| suite_gate("calderon-crosscheck", 600, |_| true))),
        ("interpolation inequality", Box::new(inequality_only)),
        ("Parseval", Box::new(|| suite_gate("parseval", 60, |_| true))),
        ("de la Vallee Poussin", Box::new(|| suite_gate("vallee-poussin", 120, |_| true))),
        ("coefficient diagnostics", Box::new(|| suite_gate("lemma3", 300, |_| true))),
        ("Lions-Peetre decomposition", Box::new(|| suite_gate("lions-peetre", 300, |_| true))),
        ("truncation chain", Box::new(|| suite_gate("truncation-chain", 300, |_| true))),
        ("covering transfer", Box::new(|| suite_gate("later-transfer", 300, |_| true))),
        ("radius bound", Box::new(|| suite_gate("radius-bound", 60, |_| true))),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("{} criterion {:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
