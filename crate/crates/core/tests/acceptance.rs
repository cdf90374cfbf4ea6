//! Runs every acceptance criterion and prints one PASS/FAIL line for each. Built without
//! the test harness so the lines always reach the output.

use std::process::ExitCode;

use xsect::acceptance::{run_all, SuiteConfig, CRITERIA};

fn main() -> ExitCode {
    let outcomes = run_all(SuiteConfig::default());
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed == 0 && outcomes.len() == CRITERIA.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
