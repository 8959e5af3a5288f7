//! The sampled-data PD protocol: gains and system matrices, sampling
//! schedules, the exact hold-interval propagator, network and mode
//! simulation, and consensus diagnostics.

mod gains;
mod metrics;
mod propagator;
mod schedule;
mod simulate;

pub use gains::{system_matrices, ProtocolGains};
pub use metrics::{consensus_metrics, uem_limit, uem_limit_mode, ConsensusMetrics, UemLimit};
pub use propagator::{expm2, hold_propagator, HeldFlow};
pub use schedule::{generate_schedule, SamplingSchedule, DEFAULT_MIN_GAP};
pub use simulate::{
    mode_samples, sampled_states, simulate_modal, simulate_mode, simulate_rk4, ModeTrajectory,
    NetworkState, Trajectory, TrajectoryMeta,
};
