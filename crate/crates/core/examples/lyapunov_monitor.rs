//! Evaluates the certified Lyapunov-Krasovskii functional along single-mode
//! trajectories and reports how it decays.

use consensus_lab::dynamics::generate_schedule;
use consensus_lab::lmi::{find_certificate, lyapunov_trace, LmiParams, SolverOptions};
use consensus_lab::ProtocolGains;
use nalgebra::Vector2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = LmiParams::new(ProtocolGains::new(1.0, 1.0)?, 0.05, 0.5)?;
    let cert = find_certificate(&params, &SolverOptions::default())?
        .certificate
        .ok_or("no certificate at the fixture point")?;
    let schedule = generate_schedule(0.05, 1e-3, 80.0, 7)?;

    for lambda in [-1.0, 0.0, 0.5] {
        let trace = lyapunov_trace(&cert, lambda, &schedule, Vector2::new(1.0, 0.0), 0.01)?;
        let v = &trace.instant_values;
        let increases = v
            .windows(2)
            .filter(|w| w[0] > 1e-12 && w[1] >= w[0])
            .count();
        let rate = trace
            .values
            .windows(2)
            .map(|w| (w[1] - w[0]) / 0.01)
            .fold(f64::NEG_INFINITY, f64::max);
        println!(
            "lambda = {lambda:+.1}: V(0) = {:.4e}, V(t_K) = {:.4e}, non-decreasing steps = {increases}, max dV/dt = {rate:.3e}",
            v[0],
            v[v.len() - 1]
        );
    }
    Ok(())
}
