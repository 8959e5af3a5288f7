//! Simulates the 8-agent network with unit gains under a random aperiodic
//! schedule and compares the consensus position with the unitary-mode limit.
//!
//! `cargo run --release --example reference_network -- [out_dir]`

use consensus_lab::dynamics::{consensus_metrics, simulate_modal, uem_limit};
use consensus_lab::graph::modal_decomposition;
use consensus_lab::scenario::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = Scenario::reference();
    let basis = modal_decomposition(&sc.graph)?;
    let schedule = sc.schedule()?;
    let traj = simulate_modal(&basis, &sc.gains, &schedule, &sc.initial, sc.output_step)?;
    let m = consensus_metrics(&traj)?;

    for threshold in [1e-2, 1e-4, 1e-6, 1e-9] {
        println!(
            "spread < {threshold:e} from t = {:?}",
            m.settling_time(threshold)
        );
    }
    let uem = uem_limit(&basis, &sc.gains, &schedule, &sc.initial, 1e-9)?;
    println!(
        "final spread {:.3e}, max speed {:.3e}",
        m.final_position_spread(),
        m.final_max_speed()
    );
    println!(
        "gamma_hat = {:.12}, UEM gamma = {:.12}",
        m.gamma_hat, uem.gamma
    );

    if let Some(dir) = std::env::args().nth(1) {
        std::fs::create_dir_all(&dir)?;
        traj.save_csv(format!("{dir}/trajectory.csv"))?;
        schedule.save(format!("{dir}/schedule.csv"))?;
        println!("wrote {dir}");
    }
    Ok(())
}
