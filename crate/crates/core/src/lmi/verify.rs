use std::path::Path;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::{assemble_lmis, DecisionVars, LmiParams};
use crate::error::{Error, Result};
use crate::linalg::eigen_range;

/// Decision variables together with the parameter point they certify.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub vars: DecisionVars,
    pub params: LmiParams,
    /// Worst slack over the six sign conditions at verification time.
    pub margin: f64,
}

/// Extreme eigenvalues of the six matrices entering the certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub passed: bool,
    pub min_eig_p: f64,
    pub min_eig_r: f64,
    pub max_eig_m: [f64; 4],
    /// `min(λmin(P), λmin(R), -λmax(M1), …, -λmax(M4))`
    pub margin: f64,
}

/// Checks `P, R ≻ margin_tol·I` and `M_i ≺ -margin_tol·I` by a full
/// symmetric eigensolve of each matrix.
pub fn verify_certificate(cert: &Certificate, margin_tol: f64) -> Result<Verification> {
    let set = assemble_lmis(&cert.vars, &cert.params);
    let (min_eig_p, _) = eigen_range(&cert.vars.p)?;
    let (min_eig_r, _) = eigen_range(&cert.vars.r)?;
    let max_eig_m = [
        eigen_range(&set.m1)?.1,
        eigen_range(&set.m2)?.1,
        eigen_range(&set.m3)?.1,
        eigen_range(&set.m4)?.1,
    ];
    let margin = max_eig_m
        .iter()
        .map(|&e| -e)
        .fold(min_eig_p.min(min_eig_r), f64::min);
    Ok(Verification {
        passed: margin > margin_tol,
        min_eig_p,
        min_eig_r,
        max_eig_m,
        margin,
    })
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    params: LmiParams,
    margin: f64,
    matrices: MatrixSet,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
struct MatrixSet {
    #[serde(rename = "P")]
    p: [[f64; 2]; 2],
    #[serde(rename = "R")]
    r: [[f64; 2]; 2],
    #[serde(rename = "Q1")]
    q1: [[f64; 2]; 2],
    #[serde(rename = "Q2")]
    q2: [[f64; 2]; 2],
}

fn rows(m: &Matrix2<f64>) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn from_rows(r: &[[f64; 2]; 2]) -> Matrix2<f64> {
    Matrix2::new(r[0][0], r[0][1], r[1][0], r[1][1])
}

impl Certificate {
    /// TOML document with the parameters and the four matrices row-major.
    /// Floats are written in shortest round-trip form, so parsing restores
    /// every bit.
    pub fn to_toml(&self) -> String {
        let file = CertificateFile {
            params: self.params,
            margin: self.margin,
            matrices: MatrixSet {
                p: rows(&self.vars.p),
                r: rows(&self.vars.r),
                q1: rows(&self.vars.q1),
                q2: rows(&self.vars.q2),
            },
        };
        toml::to_string(&file).expect("certificate serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: CertificateFile =
            toml::from_str(text).map_err(|e| Error::parse("certificate", e))?;
        let p = from_rows(&file.matrices.p);
        let r = from_rows(&file.matrices.r);
        if p != p.transpose() || r != r.transpose() {
            return Err(Error::parse("certificate", "P and R must be symmetric"));
        }
        let params = LmiParams::new(
            file.params.gains,
            file.params.tau_bar,
            file.params.lambda_bar,
        )?;
        Ok(Certificate {
            vars: DecisionVars {
                p,
                r,
                q1: from_rows(&file.matrices.q1),
                q2: from_rows(&file.matrices.q2),
            },
            params,
            margin: file.margin,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Certificate::from_toml(&text)
    }
}
