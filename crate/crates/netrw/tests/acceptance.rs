//! Runs every acceptance check and prints one PASS/FAIL line per check.

use std::process::ExitCode;
use std::time::Instant;

use netrw::checks::{run_all, DEFAULT_BOUND};

fn main() -> ExitCode {
    let start = Instant::now();
    let outcomes = run_all(DEFAULT_BOUND);
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} of {} passed in {:.1}s", outcomes.len() - failed, outcomes.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
