//! Exact modal propagation against fine-step RK4 on random graphs.

use consensus_lab::dynamics::{generate_schedule, simulate_modal, simulate_rk4};
use consensus_lab::graph::{modal_decomposition, random_connected_graph};
use consensus_lab::scenario::random_initial_state;
use consensus_lab::ProtocolGains;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gains = ProtocolGains::new(1.0, 1.0)?;
    for seed in 0..5 {
        let g = random_connected_graph(6 + seed as usize, 0.3, seed)?;
        let basis = modal_decomposition(&g)?;
        let schedule = generate_schedule(0.05, 1e-3, 10.0, seed)?;
        let x0 = random_initial_state(g.n(), 100 + seed);
        let exact = simulate_modal(&basis, &gains, &schedule, &x0, 0.1)?;
        let rk4 = simulate_rk4(&g, &gains, &schedule, &x0, 1e-4, 0.1)?;
        let (mut err, mut scale) = (0.0f64, 0.0f64);
        for (a, b) in exact.samples.iter().zip(&rk4.samples) {
            err = err.max((&a.x - &b.x).amax()).max((&a.v - &b.v).amax());
            scale = scale.max(a.x.amax()).max(a.v.amax());
        }
        println!(
            "n = {:2}, seed = {seed}: relative sup-norm error {:.3e}",
            g.n(),
            err / scale
        );
    }
    Ok(())
}
