//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;

use kvol::cli_reports::{cmd_verify, RunConfig};

fn main() -> ExitCode {
    let report = match cmd_verify(&RunConfig::default()) {
        Ok(r) => r,
        Err(e) => {
            println!("acceptance: configuration error: {e}");
            return ExitCode::FAILURE;
        }
    };
    for c in &report.criteria {
        println!(
            "criterion {:>2} {}: {} (measured {:e}, expected {:e}, tolerance {:e}, {:.2}s of {}s) {}",
            c.id,
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.expected,
            c.tolerance,
            c.elapsed_s,
            c.budget_s,
            c.detail
        );
    }
    if report.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
