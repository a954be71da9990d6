//! Run one property suite and print its checks.
//!
//! `cargo run --release --example verify_suite -- nonlin 6`

use homharm::verify::{run_suite, Suite, SuiteConfig};

fn main() -> homharm::Result<()> {
    let mut args = std::env::args().skip(1);
    let suite: Suite = args.next().as_deref().unwrap_or("transforms").parse()?;
    let bandwidth = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let config = SuiteConfig { bandwidth, timings: true, ..SuiteConfig::default() };
    let report = run_suite(suite, &config)?;
    for c in &report.checks {
        let err = c.measured_error.map_or("error".to_string(), |e| format!("{e:.3e}"));
        println!(
            "{:<6} {:<45} {:>10} <= {:.0e}  {:>8.1} ms",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            err,
            c.tolerance,
            c.wall_time_ms.unwrap_or(0.0)
        );
        if let Some(e) = &c.error {
            println!("       {e}");
        }
    }
    println!("{}", if report.all_passed() { "all checks passed" } else { "some checks failed" });
    Ok(())
}
