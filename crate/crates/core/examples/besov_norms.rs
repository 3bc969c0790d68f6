//! Dyadic Besov norms `B^{s,2}_r`, and how the `T_κ` form rebuilds them one
//! scale at a time.

use boconserve::norms::{besov_norm, dyadic_blocks, sobolev_norm, BesovParams, Summability};
use boconserve::oracles::{besov_building_check, building_corpus_sample, calibrate_building_constants};

fn main() -> boconserve::Result<()> {
    let s = -0.25;
    let f = building_corpus_sample(s, 3);
    for b in dyadic_blocks(&f) {
        println!("N = {:6}: block mass {:.5}", b.scale, b.mass);
    }
    println!("H^s norm {:.5}", sobolev_norm(&f, s));
    for r in [Summability::Finite(1.0), Summability::Finite(2.0), Summability::Infinite] {
        let p = BesovParams::new(s, r)?;
        let c = calibrate_building_constants(s, r, 0..50, &[1.0, 4.0, 16.0])?;
        print!("r = {r:>3}: ‖f‖ = {:.5}; C₁ = {:.3}, C₂ = {:.3};", besov_norm(&f, p), c.c1, c.c2);
        for k in [1.0, 16.0] {
            let b = besov_building_check(&f, s, r, k)?;
            print!("  κ₀ = {k}: L/R = {:.3}, R/B = {:.3}", b.lower_ratio, b.upper_ratio);
        }
        println!();
    }
    Ok(())
}
