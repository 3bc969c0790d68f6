//! Running oracle suites from code and summarizing the reports.

use boconserve::experiments::{run_suite, Suite};

fn main() -> boconserve::Result<()> {
    for suite in [Suite::Hs, Suite::Head, Suite::Lemma1, Suite::Line] {
        let batch = run_suite(suite)?;
        let s = batch.summary();
        println!("{suite:?}: {}/{} pass", s.passed, s.total);
        for (name, n) in &s.by_name {
            println!("    {name:<14} {:4} checks, max relative residual {:.1e}", n.checks, n.max_relative);
        }
    }
    Ok(())
}
