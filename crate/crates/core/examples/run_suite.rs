//! Running a harness suite from code and inspecting its records.

use interp_lab::harness::{list_suites, run_suite, ExperimentConfig};

fn main() -> interp_lab::Result<()> {
    for s in list_suites() {
        println!("{:<20} {}", s.name, s.description);
    }
    let cfg = ExperimentConfig { population: Some(100), ..ExperimentConfig::new("radius-bound", 42) };
    let report = run_suite(&cfg)?;
    println!("\n{}: {} passed, {} failed", report.suite, report.passed, report.failed);
    print!("{}", report.to_csv()?.lines().take(4).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
