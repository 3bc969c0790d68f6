//! Integrating the periodic Benjamin-Ono equation with ETDRK4 and checking
//! the solver against its own invariants.

use boconserve::dynamics::{evolve, self_convergence_order, Integrator, SolverConfig};
use boconserve::fourier::random_smooth;

fn main() -> boconserve::Result<()> {
    let q0 = random_smooth(3.0, 11, 8, 1.0)?;
    let config = SolverConfig {
        band: 64,
        dt: 1e-4,
        final_time: 0.2,
        integrator: Integrator::Etdrk4,
        dealias: true,
        snapshot_every: 200,
        linear_only: false,
        tail_limit: Some(1e-8),
    };
    let traj = evolve(&q0, &config)?;
    let n0 = traj.states[0].l2_norm();
    println!("{:>6} {:>12} {:>10} {:>10}", "t", "‖q‖ - ‖q₀‖", "mean", "q(t, 0)");
    for (t, q) in traj.times.iter().zip(&traj.states) {
        println!("{t:6.3} {:12.2e} {:10.2e} {:+10.6}", q.l2_norm() - n0, q.mean(), q.eval(0.0));
    }

    let dir = std::env::temp_dir().join("boconserve-evolve-example");
    traj.save(&dir)?;
    println!("trajectory written to {}", dir.display());

    let mut coarse = config.clone();
    coarse.dt = 5e-4;
    let study = self_convergence_order(&q0, &coarse, 4)?;
    let diffs: Vec<String> = study.differences.iter().map(|d| format!("{d:.2e}")).collect();
    println!("self-convergence: differences [{}], orders {:.3?}", diffs.join(", "), study.orders);
    Ok(())
}
