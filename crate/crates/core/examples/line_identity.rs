//! On the line the Hilbert-Schmidt norm of `A(κ; q)` is exactly a single
//! weighted integral of `|q̂|²`; both sides by adaptive quadrature.

use boconserve::oracles::{line_hs_identity_check, line_integrals, SpectralProfile};

fn main() -> boconserve::Result<()> {
    let profiles = [
        SpectralProfile::Gaussian { amplitude: 1.0, width: 3.0 },
        SpectralProfile::LorentzianPair { amplitude: 0.5, decay: 0.4, separation: 1.5 },
    ];
    for p in &profiles {
        println!("{p:?}: mass {:.6}", p.mass());
        for kappa in [1.0, 4.0, 16.0] {
            let li = line_integrals(p, kappa)?;
            let r = line_hs_identity_check(p, kappa)?;
            println!(
                "  κ = {kappa:4}: double {:.12}, single {:.12}, cutoff {}, relative residual {:.1e}",
                li.double_integral,
                li.single_integral,
                li.cutoff,
                r.relative()
            );
        }
    }
    Ok(())
}
