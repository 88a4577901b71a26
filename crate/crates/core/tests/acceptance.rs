//! One PASS/FAIL line per acceptance criterion, then the fault-injection check.

use std::process::ExitCode;
use std::time::Instant;

use vacuumfront::acceptance::{run_criterion, Fault, CRITERIA};

fn main() -> ExitCode {
    let mut failures = 0;
    for (id, _) in CRITERIA {
        let started = Instant::now();
        let r = run_criterion(id, None);
        println!("{r} [{:.1?}]", started.elapsed());
        if !r.passed {
            failures += 1;
        }
    }
    let seeded = run_criterion(1, Some(Fault::PerturbB));
    let caught = !seeded.passed;
    println!(
        "{} fault perturb-b detected by criterion 1: {}",
        if caught { "PASS" } else { "FAIL" },
        seeded.detail
    );
    if !caught {
        failures += 1;
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} check(s) failed");
        ExitCode::FAILURE
    }
}
