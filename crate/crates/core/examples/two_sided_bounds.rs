//! Besov norms along the flow against the two-sided factor assembled from
//! the conserved Hilbert-Schmidt control.

use boconserve::experiments::{run_conservation, two_sided_from_report, ExperimentConfig};

fn main() -> boconserve::Result<()> {
    let cfg = ExperimentConfig::from_json(include_str!("../configs/smoke.json"))?;
    let (conservation, _) = run_conservation(&cfg)?;
    let report = two_sided_from_report(&conservation)?;
    println!("κ₀ = {}", report.kappa0);
    for b in &report.bounds {
        println!(
            "{:<20} ‖q₀‖ = {:.4}: ratio ∈ [{:.4}, {:.4}] within [{:.4}, {:.4}]; F = {:.4}, F' = {:.4}; flagged {}",
            b.label, b.initial, b.min_ratio, b.max_ratio, b.lower_factor, b.upper_factor, b.factor_f, b.factor_f_alt, b.flagged
        );
    }
    Ok(())
}
