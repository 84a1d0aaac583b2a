//! Runs the full verification battery in-process and prints one line per report.

use qbracket::report::{run_suite, Status};

fn main() {
    let outcome = run_suite(None, false, |_| {}).expect("the built-in plan is valid");
    for r in &outcome.reports {
        let status = if r.status == Status::Pass { "pass" } else { "FAIL" };
        println!("{status} {:<20} {}", r.identity, r.params);
    }
    println!("{} of {} passed", outcome.verdict.passed, outcome.verdict.total);
}
