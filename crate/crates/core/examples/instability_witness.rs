//! Large sampling intervals: no certificate at `(τ̄, λ̄) = (10, 0.99)` and a
//! mode whose sampled trajectory grows without bound.

use consensus_lab::dynamics::{mode_samples, SamplingSchedule};
use consensus_lab::lmi::{find_certificate, LmiParams, SolverOptions};
use consensus_lab::ProtocolGains;
use nalgebra::Vector2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gains = ProtocolGains::new(1.0, 1.0)?;
    let params = LmiParams::new(gains, 10.0, 0.99)?;
    println!(
        "{}",
        find_certificate(&params, &SolverOptions::default())?.summary()
    );

    let schedule = SamplingSchedule::periodic(10.0, 200.0)?;
    for lambda in [0.99, 0.0, -1.0] {
        let ys = mode_samples(&gains, lambda, &schedule, Vector2::new(1.0, 0.0));
        let norms: Vec<f64> = ys.iter().map(|y| y.norm()).collect();
        let growth = (norms[norms.len() - 1] / norms[1]).powf(1.0 / (norms.len() - 2) as f64);
        println!(
            "lambda = {lambda:+.2}: |y(0)| = {:.3}, |y(200)| = {:.3e}, per-interval factor {growth:.5}",
            norms[0],
            norms[norms.len() - 1]
        );
    }
    Ok(())
}
