//! The trace identities behind dα/dt = 0 at finite truncation: the head
//! term vanishes to round-off, the telescoping and commutator terms converge
//! as the truncation grows.

use boconserve::experiments::verify::cos_mode;
use boconserve::fourier::random_smooth;
use boconserve::oracles::{commutator_residual, convergence_sweep, verify_head_identity, verify_telescope_identity, CommutatorAssembly};

fn main() -> boconserve::Result<()> {
    let q = random_smooth(2.0, 1, 8, 1.0)?;
    let head = verify_head_identity(&q, 2.0, 128)?;
    println!("head: normalized |tr A(q)A(Hq'')| = {:.1e}", head.relative());

    for ell in [2, 3] {
        let reports = [64, 128, 256]
            .iter()
            .map(|&m| verify_telescope_identity(&q, ell, 2.0, m))
            .collect::<boconserve::Result<Vec<_>>>()?;
        let sweep = convergence_sweep(&reports);
        let res: Vec<String> = sweep.relative.iter().map(|r| format!("{r:.2e}")).collect();
        println!("telescope ℓ = {ell}: residuals [{}], fitted order {:.2}", res.join(", "), sweep.fitted_order);
    }

    let (a, b) = (cos_mode(1, 1.0), cos_mode(2, 1.0));
    for m in [32, 64, 128] {
        let (exact, s1) = commutator_residual(&a, &b, 1.0, m, CommutatorAssembly::ExactKernels)?;
        let (trunc, s2) = commutator_residual(&a, &b, 1.0, m, CommutatorAssembly::Truncated)?;
        println!("commutator M⁺ = {m:3}: exact kernels {:.2e}, truncated {:.1e}", exact / s1, trunc / s2);
    }
    Ok(())
}
