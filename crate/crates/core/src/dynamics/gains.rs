use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Proportional and derivative gains of the local interaction rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGains")]
pub struct ProtocolGains {
    kp: f64,
    kd: f64,
}

#[derive(Deserialize)]
struct RawGains {
    kp: f64,
    kd: f64,
}

impl TryFrom<RawGains> for ProtocolGains {
    type Error = Error;

    fn try_from(raw: RawGains) -> Result<Self> {
        ProtocolGains::new(raw.kp, raw.kd)
    }
}

impl ProtocolGains {
    /// Both gains must be finite and strictly positive; `kp > 0` keeps the
    /// drift matrix invertible.
    pub fn new(kp: f64, kd: f64) -> Result<Self> {
        if !(kp.is_finite() && kp > 0.0) {
            return Err(Error::param(format!("kp must be positive, got {kp}")));
        }
        if !(kd.is_finite() && kd > 0.0) {
            return Err(Error::param(format!("kd must be positive, got {kd}")));
        }
        Ok(ProtocolGains { kp, kd })
    }

    pub fn kp(&self) -> f64 {
        self.kp
    }

    pub fn kd(&self) -> f64 {
        self.kd
    }

    /// Own-state feedback `[[0, 1], [-kp, -kd]]`.
    pub fn a(&self) -> Matrix2<f64> {
        Matrix2::new(0.0, 1.0, -self.kp, -self.kd)
    }

    /// Neighbour feedback `[[0, 0], [kp, kd]]`.
    pub fn b(&self) -> Matrix2<f64> {
        Matrix2::new(0.0, 0.0, self.kp, self.kd)
    }

    /// Closed-form inverse of `A` (`det A = kp`).
    pub fn a_inv(&self) -> Matrix2<f64> {
        Matrix2::new(-self.kd / self.kp, -1.0 / self.kp, 1.0, 0.0)
    }
}

pub fn system_matrices(gains: &ProtocolGains) -> (Matrix2<f64>, Matrix2<f64>) {
    (gains.a(), gains.b())
}
