use nalgebra::Vector2;

use super::{mode_samples, NetworkState, ProtocolGains, SamplingSchedule, Trajectory};
use crate::error::{Error, Result};
use crate::graph::ModalBasis;

/// Disagreement diagnostics along a network trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusMetrics {
    pub times: Vec<f64>,
    /// `max_{i,j} |x_i - x_j|`
    pub position_spread: Vec<f64>,
    /// `max_{i,j} |v_i - v_j|`
    pub velocity_spread: Vec<f64>,
    /// `max_i |v_i|`
    pub max_speed: Vec<f64>,
    /// Mean position at the last sample.
    pub gamma_hat: f64,
}

impl ConsensusMetrics {
    pub fn final_position_spread(&self) -> f64 {
        *self.position_spread.last().expect("non-empty")
    }

    pub fn final_velocity_spread(&self) -> f64 {
        *self.velocity_spread.last().expect("non-empty")
    }

    pub fn final_max_speed(&self) -> f64 {
        *self.max_speed.last().expect("non-empty")
    }

    /// First time after which the position spread stays below `threshold`.
    pub fn settling_time(&self, threshold: f64) -> Option<f64> {
        let last_above = self.position_spread.iter().rposition(|&d| d >= threshold);
        match last_above {
            None => self.times.first().copied(),
            Some(i) => self.times.get(i + 1).copied(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,position_spread,velocity_spread,max_speed\n");
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.times[i], self.position_spread[i], self.velocity_spread[i], self.max_speed[i]
            ));
        }
        out
    }
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

pub fn consensus_metrics(traj: &Trajectory) -> Result<ConsensusMetrics> {
    let last = traj.samples.last().ok_or(Error::EmptyTrajectory)?;
    let position_spread = traj
        .samples
        .iter()
        .map(|s| spread(s.x.iter().copied()))
        .collect();
    let velocity_spread = traj
        .samples
        .iter()
        .map(|s| spread(s.v.iter().copied()))
        .collect();
    let max_speed = traj.samples.iter().map(|s| s.v.amax()).collect();
    let gamma_hat = if last.n() == 0 { 0.0 } else { last.x.mean() };
    Ok(ConsensusMetrics {
        times: traj.samples.iter().map(|s| s.t).collect(),
        position_spread,
        velocity_spread,
        max_speed,
        gamma_hat,
    })
}

/// Limit of the unitary-eigenvalue mode at the last sampling instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UemLimit {
    pub gamma: f64,
    /// `|z₁(t_K) - z₁(t_{K-1})|`
    pub residual: f64,
}

/// Runs only the `λ = 1` mode from `y0 = (z₁, ż₁)` over the schedule.
/// Fails with the residual when it is still above `tolerance`.
pub fn uem_limit_mode(
    gains: &ProtocolGains,
    schedule: &SamplingSchedule,
    y0: Vector2<f64>,
    tolerance: f64,
) -> Result<UemLimit> {
    let samples = mode_samples(gains, 1.0, schedule, y0);
    let last = samples[samples.len() - 1];
    let residual = match samples.len() {
        1 => 0.0,
        len => (last[0] - samples[len - 2][0]).abs(),
    };
    if !(residual <= tolerance) {
        return Err(Error::NotSettled {
            residual,
            tolerance,
        });
    }
    Ok(UemLimit {
        gamma: last[0],
        residual,
    })
}

/// The consensus value predicted by the UEM for a network initial state.
pub fn uem_limit(
    basis: &ModalBasis,
    gains: &ProtocolGains,
    schedule: &SamplingSchedule,
    initial: &NetworkState,
    tolerance: f64,
) -> Result<UemLimit> {
    if initial.n() != basis.n() {
        return Err(Error::Dimension {
            expected: basis.n(),
            actual: initial.n(),
        });
    }
    let row = basis.t_inv().row(0);
    let y0 = Vector2::new(
        row.dot(&initial.x.transpose()),
        row.dot(&initial.v.transpose()),
    );
    uem_limit_mode(gains, schedule, y0, tolerance)
}
