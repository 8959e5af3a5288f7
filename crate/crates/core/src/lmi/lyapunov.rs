//! Numerical monitor of the Lyapunov–Krasovskii functional
//!
//! ```text
//! V(t) = yᵀ(t) P y(t) + (τ̄ - τ(t)) ∫_{t_k}^{t} ẏᵀ(s) R ẏ(s) ds,   τ(t) = t - t_k
//! ```
//!
//! along an exactly simulated mode. Inside a hold interval
//! `ẏ(t_k + s) = exp(As) (A + λB) y(t_k)`.

use nalgebra::Vector2;

use super::Certificate;
use crate::dynamics::{expm2, mode_samples, HeldFlow, SamplingSchedule};
use crate::error::{Error, Result};

const QUAD_REL_TOL: f64 = 1e-12;
const QUAD_MAX_DEPTH: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovTrace {
    /// Output grid `j·output_step`.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// `V(t_k) = y(t_k)ᵀ P y(t_k)` at every sampling instant.
    pub instant_values: Vec<f64>,
}

/// Adaptive composite Simpson quadrature with relative tolerance `rel_tol`
/// (absolute floor `abs_floor`).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let eps = (rel_tol * whole.abs()).max(abs_floor);
    simpson_step(&f, a, b, fa, fm, fb, whole, eps, QUAD_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

/// Evaluates `V` on the output grid and at every sampling instant for the
/// mode with eigenvalue `lambda` started at `y0`.
pub fn lyapunov_trace(
    cert: &Certificate,
    lambda: f64,
    schedule: &SamplingSchedule,
    y0: Vector2<f64>,
    output_step: f64,
) -> Result<LyapunovTrace> {
    let params = &cert.params;
    if !(-1.0..=params.lambda_bar).contains(&lambda) {
        return Err(Error::param(format!(
            "lambda = {lambda} outside the certified range [-1, {}]",
            params.lambda_bar
        )));
    }
    if schedule.tau_bar() > params.tau_bar {
        return Err(Error::param(format!(
            "schedule allows gaps up to {} but the certificate covers {}",
            schedule.tau_bar(),
            params.tau_bar
        )));
    }
    if !(output_step > 0.0) {
        return Err(Error::param("output step must be positive"));
    }
    let gains = &params.gains;
    let (p, r) = (&cert.vars.p, &cert.vars.r);
    let gamma = gains.a() + gains.b() * lambda;
    let lambda_b = gains.b() * lambda;
    let held = mode_samples(gains, lambda, schedule, y0);
    let instants = schedule.instants();

    let quadratic = |m: &nalgebra::Matrix2<f64>, y: &Vector2<f64>| (y.transpose() * m * y)[(0, 0)];
    let instant_values = held.iter().map(|y| quadratic(p, y)).collect();

    let count = (schedule.end() / output_step).floor() as usize;
    let mut times = Vec::with_capacity(count + 1);
    let mut values = Vec::with_capacity(count + 1);
    for j in 0..=count {
        let t = j as f64 * output_step;
        if t > schedule.end() {
            break;
        }
        let k = schedule.interval_of(t);
        let yk = held[k];
        let s = t - instants[k];
        let y = HeldFlow::new(gains, s).propagate(&yk, &yk, &lambda_b);
        let slope0 = gamma * yk;
        let integrand = |u: f64| {
            let ydot = expm2(&gains.a(), u).0 * slope0;
            quadratic(r, &ydot)
        };
        let integral = adaptive_simpson(integrand, 0.0, s, QUAD_REL_TOL, 1e-300);
        times.push(t);
        values.push(quadratic(p, &y) + (params.tau_bar - s) * integral);
    }
    Ok(LyapunovTrace {
        times,
        values,
        instant_values,
    })
}
