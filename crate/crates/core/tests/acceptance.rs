//! Acceptance gate: one PASS/FAIL line per criterion, followed by the
//! individual checks behind it. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use tcs_core::verify::suite::{criterion, SuiteOptions, CRITERIA};

const TITLES: [&str; CRITERIA] = [
    "symplectic invariant and Bose commutator",
    "closed forms against the RK45 oracle",
    "Schrodinger residual with fault control",
    "Gram matrix orthonormality",
    "moments against quadrature",
    "uncertainty products and expanded forms",
    "minimization times",
    "mu solver",
    "coherent states",
    "norm conservation and undamped reduction",
];

fn main() -> ExitCode {
    let opts = SuiteOptions::default();
    let start = Instant::now();
    let mut failed = 0;
    for k in 1..=CRITERIA {
        let t0 = Instant::now();
        let checks = criterion(k, &opts);
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {k:>2} {}: {} ({:.2}s)",
            if pass { "PASS" } else { "FAIL" },
            TITLES[k - 1],
            t0.elapsed().as_secs_f64()
        );
        for c in &checks {
            let verdict = if c.pass { "ok" } else { "FAILED" };
            println!("    {:<36} max_error={:.3e} tol={:.1e} {verdict}", c.name, c.max_error, c.tol);
        }
    }
    println!(
        "acceptance: {}/{CRITERIA} criteria passed in {:.1}s",
        CRITERIA - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
