//! α(κ; q(t)) along a Benjamin-Ono trajectory, driven by the shipped smoke
//! config.

use boconserve::experiments::{run_conservation, ExperimentConfig};

fn main() -> boconserve::Result<()> {
    let cfg = ExperimentConfig::from_json(include_str!("../configs/smoke.json"))?;
    let (report, _) = run_conservation(&cfg)?;
    let h = &report.header;
    println!("κ = {} (config {}…), α evaluated at M⁺ = {}", h.kappa, &h.config_hash[..12], h.alpha_dim);
    println!("{:>6} {:>16} {:>12} {:>12}", "t", "α", "‖A‖²", "⟨q,T q⟩");
    for r in &report.rows {
        println!("{:6.3} {:16.12} {:12.6} {:12.6}", r.t, r.alpha, r.hs_squared, r.t_form);
    }
    let s = &report.summary;
    println!(
        "max relative α drift {:.2e}, sup ‖A(t)‖²/‖A(0)‖² = {:.4} (≤ 2), sup T(t)/T(0) = {:.4}",
        s.max_alpha_drift, s.max_hs_ratio, s.max_t_form_ratio
    );
    Ok(())
}
