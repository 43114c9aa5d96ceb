//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Uses its own `main` so the lines show without `--nocapture`.

use std::process::ExitCode;

use tfse_core::verify::{self, Effort, Suite};

fn main() -> ExitCode {
    let outcomes = verify::run_suite(Suite::All, Effort::Full);
    for o in &outcomes {
        println!("{} criterion {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.name);
    }
    println!();
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed", outcomes.len(), outcomes.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
