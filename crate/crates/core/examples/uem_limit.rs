//! Consensus value predicted by the unitary-eigenvalue mode alone.

use consensus_lab::dynamics::{uem_limit_mode, SamplingSchedule};
use consensus_lab::ProtocolGains;
use nalgebra::Vector2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gains = ProtocolGains::new(1.0, 1.0)?;
    for horizon in [100.0, 500.0, 1500.0] {
        let schedule = SamplingSchedule::periodic(0.05, horizon)?;
        match uem_limit_mode(&gains, &schedule, Vector2::new(0.0, 1.0), 1e-12) {
            Ok(u) => println!(
                "horizon {horizon}: gamma = {:.15} (residual {:.1e})",
                u.gamma, u.residual
            ),
            Err(e) => println!("horizon {horizon}: {e}"),
        }
    }
    Ok(())
}
