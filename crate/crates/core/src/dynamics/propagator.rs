//! Exact propagation of `ẏ = A y + λ B y(t_k)` across a hold interval.

use nalgebra::{Matrix2, Vector2};

use super::ProtocolGains;

const SERIES_THRESHOLD: f64 = 0.1;
const SERIES_TERMS: usize = 14;

/// `exp(M h)` and `exp(M h) - I` for a 2×2 matrix in closed form.
///
/// Writes `M = sI + N` with `s = tr(M)/2`, so that `N² = qI` with
/// `q = s² - det M`. Then `exp(Mh) = e^{sh} (C I + S N)` where
/// `C = cosh(√q h)`, `S = sinh(√q h)/√q` (trigonometric for `q < 0`). Both
/// are evaluated by power series in `q h²` near zero, which also covers the
/// repeated-root case `q = 0` exactly.
pub fn expm2(m: &Matrix2<f64>, h: f64) -> (Matrix2<f64>, Matrix2<f64>) {
    let s = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let q = s * s - det;
    let n = m - Matrix2::identity() * s;
    let (c_minus_one, sinhc) = hyperbolic_parts(q, h);
    let es = (s * h).exp();
    let es_m1 = (s * h).exp_m1();
    let c = 1.0 + c_minus_one;
    // e^{sh} C - 1 = (e^{sh} - 1) C + (C - 1)
    let diag = es_m1 * c + c_minus_one;
    let exp_minus_i = Matrix2::identity() * diag + n * (es * sinhc);
    (exp_minus_i + Matrix2::identity(), exp_minus_i)
}

/// Returns `(C - 1, S)`.
fn hyperbolic_parts(q: f64, h: f64) -> (f64, f64) {
    let x = q * h * h;
    if x.abs() < SERIES_THRESHOLD {
        // C - 1 = Σ_{k≥1} x^k/(2k)!,  S = h Σ_{k≥0} x^k/(2k+1)!
        let mut c_term = 1.0;
        let mut s_term = 1.0;
        let mut c_sum = 0.0;
        let mut s_sum = 1.0;
        for k in 1..SERIES_TERMS {
            let kf = k as f64;
            c_term *= x / ((2.0 * kf - 1.0) * (2.0 * kf));
            s_term *= x / ((2.0 * kf) * (2.0 * kf + 1.0));
            c_sum += c_term;
            s_sum += s_term;
        }
        (c_sum, h * s_sum)
    } else if q > 0.0 {
        let r = q.sqrt();
        let half = (0.5 * r * h).sinh();
        (2.0 * half * half, (r * h).sinh() / r)
    } else {
        let r = (-q).sqrt();
        let half = (0.5 * r * h).sin();
        (-2.0 * half * half, (r * h).sin() / r)
    }
}

/// Flow of the held-input mode dynamics over a step `h`:
/// `y(t + h) = exp · y(t) + integral · λB · u` with `u` the held sample and
/// `integral = ∫₀ʰ exp(As) ds = A⁻¹(exp(Ah) - I)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeldFlow {
    pub exp: Matrix2<f64>,
    pub integral: Matrix2<f64>,
}

impl HeldFlow {
    pub fn new(gains: &ProtocolGains, h: f64) -> Self {
        let (exp, exp_minus_i) = expm2(&gains.a(), h);
        HeldFlow {
            exp,
            integral: gains.a_inv() * exp_minus_i,
        }
    }

    /// Transition matrix when the held sample equals the state at the start
    /// of the step.
    pub fn transition(&self, lambda_b: &Matrix2<f64>) -> Matrix2<f64> {
        self.exp + self.integral * lambda_b
    }

    pub fn propagate(
        &self,
        y: &Vector2<f64>,
        held: &Vector2<f64>,
        lambda_b: &Matrix2<f64>,
    ) -> Vector2<f64> {
        self.exp * y + self.integral * (lambda_b * held)
    }
}

/// `Φ(dt) = exp(A dt) + A⁻¹(exp(A dt) - I) λ B`, the exact one-interval map
/// `y(t_k + dt) = Φ(dt) y(t_k)`.
///
/// # Panics
/// If `dt` is negative or not finite.
pub fn hold_propagator(gains: &ProtocolGains, lambda: f64, dt: f64) -> Matrix2<f64> {
    assert!(
        dt.is_finite() && dt >= 0.0,
        "dt must be non-negative, got {dt}"
    );
    HeldFlow::new(gains, dt).transition(&(gains.b() * lambda))
}
