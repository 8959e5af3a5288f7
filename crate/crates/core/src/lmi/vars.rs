use nalgebra::{Matrix2, SVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::ProtocolGains;
use crate::error::{Error, Result};

/// Length of the packed decision vector: 3 + 3 (symmetric P, R) + 4 + 4.
pub const N_VARS: usize = 14;

/// Problem data a certificate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmiParams {
    #[serde(flatten)]
    pub gains: ProtocolGains,
    pub tau_bar: f64,
    pub lambda_bar: f64,
}

impl LmiParams {
    /// Requires `τ̄ > 0` and `λ̄ < 1`.
    pub fn new(gains: ProtocolGains, tau_bar: f64, lambda_bar: f64) -> Result<Self> {
        if !(tau_bar.is_finite() && tau_bar > 0.0) {
            return Err(Error::param(format!(
                "tau_bar must be positive, got {tau_bar}"
            )));
        }
        if !(lambda_bar.is_finite() && lambda_bar < 1.0) {
            return Err(Error::param(format!(
                "lambda_bar must be below 1, got {lambda_bar}"
            )));
        }
        Ok(LmiParams {
            gains,
            tau_bar,
            lambda_bar,
        })
    }

    /// Solver-side guard: additionally `λ̄ > -1`.
    pub(crate) fn check_open_interval(&self) -> Result<()> {
        if self.lambda_bar <= -1.0 {
            return Err(Error::param(format!(
                "lambda_bar must lie in (-1, 1), got {}",
                self.lambda_bar
            )));
        }
        Ok(())
    }
}

/// The LMI unknowns. `P` and `R` are kept symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionVars {
    pub p: Matrix2<f64>,
    pub r: Matrix2<f64>,
    pub q1: Matrix2<f64>,
    pub q2: Matrix2<f64>,
}

impl DecisionVars {
    pub fn zeros() -> Self {
        DecisionVars {
            p: Matrix2::zeros(),
            r: Matrix2::zeros(),
            q1: Matrix2::zeros(),
            q2: Matrix2::zeros(),
        }
    }

    /// Packing: `p11 p12 p22 r11 r12 r22`, then `Q1` and `Q2` row-major.
    pub fn to_vector(&self) -> SVector<f64, N_VARS> {
        let (p, r, q1, q2) = (&self.p, &self.r, &self.q1, &self.q2);
        SVector::from([
            p[(0, 0)],
            p[(0, 1)],
            p[(1, 1)],
            r[(0, 0)],
            r[(0, 1)],
            r[(1, 1)],
            q1[(0, 0)],
            q1[(0, 1)],
            q1[(1, 0)],
            q1[(1, 1)],
            q2[(0, 0)],
            q2[(0, 1)],
            q2[(1, 0)],
            q2[(1, 1)],
        ])
    }

    pub fn from_vector(v: &SVector<f64, N_VARS>) -> Self {
        DecisionVars {
            p: Matrix2::new(v[0], v[1], v[1], v[2]),
            r: Matrix2::new(v[3], v[4], v[4], v[5]),
            q1: Matrix2::new(v[6], v[7], v[8], v[9]),
            q2: Matrix2::new(v[10], v[11], v[12], v[13]),
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        DecisionVars {
            p: self.p * alpha,
            r: self.r * alpha,
            q1: self.q1 * alpha,
            q2: self.q2 * alpha,
        }
    }

    /// `trace(P) + trace(R)`, the normalization functional.
    pub fn trace_sum(&self) -> f64 {
        self.p.trace() + self.r.trace()
    }
}
