use nalgebra::{Matrix2, Matrix4, Matrix6};

use super::{DecisionVars, LmiParams};
use crate::error::{Error, Result};

/// The four stability matrices for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmiSet {
    pub m1: Matrix4<f64>,
    pub m2: Matrix4<f64>,
    pub m3: Matrix6<f64>,
    pub m4: Matrix6<f64>,
}

impl LmiSet {
    pub fn scaled(&self, alpha: f64) -> Self {
        LmiSet {
            m1: self.m1 * alpha,
            m2: self.m2 * alpha,
            m3: self.m3 * alpha,
            m4: self.m4 * alpha,
        }
    }
}

/// ```text
/// [ Q1ᵀΓ + ΓᵀQ1    P - Q1ᵀ + ΓᵀQ2 ]
/// [      *         -Q2 - Q2ᵀ + τ̄R ]
/// ```
fn fresh_sample_block(v: &DecisionVars, gamma: &Matrix2<f64>, tau_bar: f64) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    let a11 = v.q1.transpose() * gamma + gamma.transpose() * v.q1;
    let a12 = v.p - v.q1.transpose() + gamma.transpose() * v.q2;
    let a22 = -v.q2 - v.q2.transpose() + v.r * tau_bar;
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a11);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&a12);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&a12.transpose());
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&a22);
    m
}

/// ```text
/// [ Q1ᵀΓ + ΓᵀQ1    P - Q1ᵀ + ΓᵀQ2    c·Q1ᵀB ]
/// [      *          -Q2 - Q2ᵀ         c·Q2ᵀB ]
/// [      *              *             -τ̄R    ]
/// ```
fn oldest_sample_block(
    v: &DecisionVars,
    gamma: &Matrix2<f64>,
    b: &Matrix2<f64>,
    coupling: f64,
    tau_bar: f64,
) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    let a11 = v.q1.transpose() * gamma + gamma.transpose() * v.q1;
    let a12 = v.p - v.q1.transpose() + gamma.transpose() * v.q2;
    let a13 = v.q1.transpose() * b * coupling;
    let a22 = -v.q2 - v.q2.transpose();
    let a23 = v.q2.transpose() * b * coupling;
    let a33 = -v.r * tau_bar;
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a11);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&a12);
    m.fixed_view_mut::<2, 2>(0, 4).copy_from(&a13);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&a12.transpose());
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&a22);
    m.fixed_view_mut::<2, 2>(2, 4).copy_from(&a23);
    m.fixed_view_mut::<2, 2>(4, 0).copy_from(&a13.transpose());
    m.fixed_view_mut::<2, 2>(4, 2).copy_from(&a23.transpose());
    m.fixed_view_mut::<2, 2>(4, 4).copy_from(&a33);
    m
}

/// Builds `M1..M4`. `M1`, `M3` use `Γ = A - B`; `M2`, `M4` use `Γ = A + λ̄B`.
pub fn assemble_lmis(vars: &DecisionVars, params: &LmiParams) -> LmiSet {
    let (a, b) = (params.gains.a(), params.gains.b());
    let (tau_bar, lambda_bar) = (params.tau_bar, params.lambda_bar);
    let low = a - b;
    let high = a + b * lambda_bar;
    LmiSet {
        m1: fresh_sample_block(vars, &low, tau_bar),
        m2: fresh_sample_block(vars, &high, tau_bar),
        m3: oldest_sample_block(vars, &low, &b, tau_bar, tau_bar),
        m4: oldest_sample_block(vars, &high, &b, -tau_bar * lambda_bar, tau_bar),
    }
}

/// Bound matrix `Ψ(τ, λ)` on `η = [y; ẏ; ξ]` at delay `τ ∈ [0, τ̄]` and
/// eigenvalue `λ`, with `Γ = A + λB`:
///
/// ```text
/// [ Q1ᵀΓ + ΓᵀQ1    P - Q1ᵀ + ΓᵀQ2          -τλ Q1ᵀB ]
/// [      *         -Q2 - Q2ᵀ + (τ̄-τ)R      -τλ Q2ᵀB ]
/// [      *               *                  -τR      ]
/// ```
pub fn psi(vars: &DecisionVars, params: &LmiParams, tau: f64, lambda: f64) -> Result<Matrix6<f64>> {
    let tau_bar = params.tau_bar;
    if !(0.0..=tau_bar).contains(&tau) {
        return Err(Error::param(format!("tau = {tau} outside [0, {tau_bar}]")));
    }
    let (a, b) = (params.gains.a(), params.gains.b());
    let gamma = a + b * lambda;
    let (p, r, q1, q2) = (&vars.p, &vars.r, &vars.q1, &vars.q2);
    let blocks = [
        [
            q1.transpose() * gamma + gamma.transpose() * q1,
            p - q1.transpose() + gamma.transpose() * q2,
            -(q1.transpose() * b) * (tau * lambda),
        ],
        [
            Matrix2::zeros(),
            -q2 - q2.transpose() + r * (tau_bar - tau),
            -(q2.transpose() * b) * (tau * lambda),
        ],
        [Matrix2::zeros(), Matrix2::zeros(), -r * tau],
    ];
    let mut m = Matrix6::zeros();
    for i in 0..3 {
        for j in i..3 {
            m.fixed_view_mut::<2, 2>(2 * i, 2 * j)
                .copy_from(&blocks[i][j]);
            if j > i {
                m.fixed_view_mut::<2, 2>(2 * j, 2 * i)
                    .copy_from(&blocks[i][j].transpose());
            }
        }
    }
    Ok(m)
}

/// Embeds a 4×4 matrix as the leading block of a 6×6 zero matrix.
pub fn embed(m: &Matrix4<f64>) -> Matrix6<f64> {
    let mut out = Matrix6::zeros();
    out.fixed_view_mut::<4, 4>(0, 0).copy_from(m);
    out
}
