//! Data with mean μ: evolve it directly, or evolve the mean-zero part and
//! apply the Galilei boost `q(t, x + 2μt) + μ`.

use boconserve::experiments::{run_galilei, ExperimentConfig};

fn main() -> boconserve::Result<()> {
    let mut cfg = ExperimentConfig::from_json(include_str!("../configs/smoke.json"))?;
    for mu in [0.0, 0.25, 0.5, 1.0] {
        cfg.galilei_mu = mu;
        let r = run_galilei(&cfg)?;
        println!("μ = {mu}: relative discrepancy {:.2e}", r.relative_discrepancy);
        for c in &r.comparability {
            println!("    {:<20} ‖q̃‖²/(‖q‖² + μ²) ∈ [{:.4}, {:.4}]", c.label, c.min_ratio, c.max_ratio);
        }
    }
    Ok(())
}
