//! Stability certificates for the non-unitary modes.
//!
//! A certificate is a tuple `(P, R, Q1, Q2)` of 2×2 matrices with `P, R ≻ 0`
//! making the four block matrices `M1..M4` negative definite. `M1`/`M3` are
//! evaluated at the spectral endpoint `λ = -1`, `M2`/`M4` at the connectivity
//! bound `λ̄`; `M1`/`M2` cover a fresh sample (`τ = 0`) and `M3`/`M4` the
//! oldest admissible one (`τ = τ̄`). Every `Ψ(τ, λ)` on that rectangle is a
//! bilinear mixture of the four, which is what makes a single certificate
//! valid for the whole uncertain spectrum.

mod assemble;
mod lyapunov;
mod solver;
mod vars;
mod verify;

pub use assemble::{assemble_lmis, embed, psi, LmiSet};
pub use lyapunov::{adaptive_simpson, lyapunov_trace, LyapunovTrace};
pub use solver::{
    find_certificate, find_certificate_from, FeasibilityReport, FeasibilityStatus, SolverOptions,
};
pub use vars::{DecisionVars, LmiParams, N_VARS};
pub use verify::{verify_certificate, Certificate, Verification};
