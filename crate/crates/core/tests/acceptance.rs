//! One line per acceptance criterion. Runs every suite at its default budget.
//!
//! `ACCEPTANCE_SEED` overrides the seed; `ACCEPTANCE_ONLY=zoom,moments` runs a subset.

use std::process::ExitCode;
use std::time::Instant;

use stable_trees::verify::{run_suite, SuiteConfig, SUITES};

const TITLES: [&str; 8] = [
    "oracle identities",
    "exact functional invariants",
    "moments Monte Carlo (Brownian, gamma=2)",
    "subordinator Monte Carlo",
    "subcritical trend",
    "supercritical concentration",
    "zoom marginal",
    "sampler validation",
];

fn main() -> ExitCode {
    let seed = std::env::var("ACCEPTANCE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(1);
    let only: Option<Vec<String>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').map(|x| x.trim().to_string()).collect());
    let config = SuiteConfig::with_seed(seed);
    let mut failed = 0;
    for (i, (suite, title)) in SUITES.iter().zip(TITLES).enumerate() {
        if only.as_ref().is_some_and(|o| !o.iter().any(|s| s == suite)) {
            continue;
        }
        let start = Instant::now();
        let line = match run_suite(suite, &config) {
            Ok(report) => {
                let status = if report.pass { "PASS" } else { "FAIL" };
                if !report.pass {
                    failed += 1;
                    eprint!("{report}");
                }
                let worst = report.checks.iter().filter(|c| !c.pass).count();
                format!("[{status}] C{} {title} ({} checks, {worst} failed)", i + 1, report.checks.len())
            }
            Err(e) => {
                failed += 1;
                format!("[FAIL] C{} {title}: {e}", i + 1)
            }
        };
        println!("{line} [{:.0}s]", start.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
