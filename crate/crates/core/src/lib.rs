//! Sampled-data PD consensus for second-order multi-agent systems.
//!
//! Agents exchange positions and velocities with their neighbours only at
//! aperiodic sampling instants `t_k` (gaps bounded by `τ̄`) while each agent
//! uses its own state continuously. The crate provides
//!
//! - [`graph`]: topologies, the weighted adjacency `Δ⁻¹A` and the modal basis
//!   that decouples the network into 2-dimensional modes;
//! - [`dynamics`]: exact (closed-form) and RK4 simulation of the protocol,
//!   sampling schedules and consensus diagnostics;
//! - [`lmi`]: the four stability LMIs, a self-contained max-eigenvalue
//!   feasibility solver, certificate verification and a Lyapunov monitor;
//! - [`region`]: bisection sweeps of the certified `(λ̄, τ̄)` region;
//! - [`cli`], [`scenario`], [`plot`]: the command-line front end, scenario
//!   files and dependency-free SVG output.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod lmi;
pub mod plot;
pub mod region;
pub mod scenario;

pub use dynamics::{ProtocolGains, SamplingSchedule};
pub use error::{Error, Result};
pub use graph::{Graph, ModalBasis};
