//! Every acceptance check on the standard fixture, one line per check.
//!
//! `DIOPH_WORKERS` overrides the thread count.

use std::process::ExitCode;
use std::time::Instant;

use dioph::checks::{run_all, Context, CHECKS};
use dioph::config::Config;

fn main() -> ExitCode {
    let cfg = Config::default();
    let ctx = Context {
        fixture: cfg.fixture.build().expect("standard fixture"),
        eds: cfg.eds(),
        count_cap: cfg.count_cap,
        seed: cfg.seed,
    };
    let workers = std::env::var("DIOPH_WORKERS")
        .ok()
        .and_then(|w| w.parse().ok())
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let all: Vec<_> = CHECKS.iter().collect();
    let start = Instant::now();
    let results = run_all(&ctx, &all, workers);
    let mut failed = 0;
    for (check, out, ms) in &results {
        let verdict = if out.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {:<22} {:>9.1} s  {}", check.id, check.name, ms / 1e3, check.title);
        if let Some(c) = &out.counterexample {
            failed += 1;
            println!("        counterexample: {c}");
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
