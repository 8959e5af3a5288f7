//! Feasibility search for `(P, R, Q1, Q2)` by minimizing the largest signed
//! extreme eigenvalue over the six conditions,
//!
//! ```text
//! f(θ) = max( λmax(-P), λmax(-R), λmax(M1(θ)), …, λmax(M4(θ)) )
//! ```
//!
//! on the affine slice `trace(P) + trace(R) = 2`. `f` is convex and
//! piecewise smooth; a subgradient at `θ` is `∂/∂θ_j (vᵀ C(θ) v)` for the
//! active matrix `C` and its top eigenvector `v`. Steps follow Polyak's rule
//! against a moving target `f_best - δ`; `δ` shrinks and the iterate returns
//! to the incumbent whenever a stall window passes without progress.

use nalgebra::{Matrix2, Matrix4, Matrix6, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{assemble_lmis, verify_certificate, Certificate, DecisionVars, LmiParams, N_VARS};
use crate::error::Result;
use crate::linalg::max_eigenpair;

type Theta = SVector<f64, N_VARS>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Total subgradient iterations over all starts.
    pub max_iters: usize,
    /// Required slack on every eigenvalue condition.
    pub feas_tol: f64,
    pub seed: u64,
    /// Additional starts from seeded random points after the first one.
    pub restarts: usize,
    /// Iterations spent enlarging the margin after first reaching feasibility.
    pub polish_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iters: 8000,
            feas_tol: 1e-7,
            seed: 0,
            restarts: 1,
            polish_iters: 300,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    /// The search did not find a certificate. This is not a proof of
    /// infeasibility: the LMIs are only sufficient and the search is local.
    NoCertificateFound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub status: FeasibilityStatus,
    pub certificate: Option<Certificate>,
    /// Best objective value after every iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub best_objective: f64,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }

    pub fn summary(&self) -> String {
        match (&self.status, &self.certificate) {
            (FeasibilityStatus::Feasible, Some(c)) => format!(
                "feasible: certificate found after {} iterations, margin {:.3e}",
                self.iterations, c.margin
            ),
            _ => format!(
                "no certificate found after {} iterations (best objective {:.3e}); \
                 this is not a proof of infeasibility",
                self.iterations, self.best_objective
            ),
        }
    }
}

/// The linear map θ ↦ (−P, −R, M1..M4) sampled on the unit vectors.
struct ConstraintBasis {
    neg_p: [Matrix2<f64>; N_VARS],
    neg_r: [Matrix2<f64>; N_VARS],
    m1: [Matrix4<f64>; N_VARS],
    m2: [Matrix4<f64>; N_VARS],
    m3: [Matrix6<f64>; N_VARS],
    m4: [Matrix6<f64>; N_VARS],
}

impl ConstraintBasis {
    fn new(params: &LmiParams) -> Self {
        let unit =
            |j: usize| DecisionVars::from_vector(&Theta::from_fn(|i, _| (i == j) as u8 as f64));
        let sets: Vec<_> = (0..N_VARS)
            .map(|j| (unit(j), assemble_lmis(&unit(j), params)))
            .collect();
        ConstraintBasis {
            neg_p: std::array::from_fn(|j| -sets[j].0.p),
            neg_r: std::array::from_fn(|j| -sets[j].0.r),
            m1: std::array::from_fn(|j| sets[j].1.m1),
            m2: std::array::from_fn(|j| sets[j].1.m2),
            m3: std::array::from_fn(|j| sets[j].1.m3),
            m4: std::array::from_fn(|j| sets[j].1.m4),
        }
    }

    /// Objective value and a subgradient.
    fn evaluate(&self, theta: &Theta) -> Result<(f64, Theta)> {
        let mut best = (f64::NEG_INFINITY, Theta::zeros());
        consider(&self.neg_p, theta, &mut best)?;
        consider(&self.neg_r, theta, &mut best)?;
        consider(&self.m1, theta, &mut best)?;
        consider(&self.m2, theta, &mut best)?;
        consider(&self.m3, theta, &mut best)?;
        consider(&self.m4, theta, &mut best)?;
        Ok(best)
    }
}

fn consider<const D: usize>(
    basis: &[nalgebra::SMatrix<f64, D, D>; N_VARS],
    theta: &Theta,
    best: &mut (f64, Theta),
) -> Result<()> {
    let m = basis
        .iter()
        .zip(theta.iter())
        .fold(nalgebra::SMatrix::<f64, D, D>::zeros(), |acc, (b, &t)| {
            acc + b * t
        });
    let (value, v) = max_eigenpair(&m)?;
    if value > best.0 {
        let grad = Theta::from_fn(|j, _| (v.transpose() * basis[j] * v)[(0, 0)]);
        *best = (value, grad);
    }
    Ok(())
}

/// Indicator of the diagonal entries of P and R in the packed vector.
fn trace_normal() -> Theta {
    let mut n = Theta::zeros();
    for i in [0, 2, 3, 5] {
        n[i] = 1.0;
    }
    n
}

fn normalize(theta: &Theta) -> Theta {
    let n = trace_normal();
    theta + n * ((2.0 - n.dot(theta)) / n.norm_squared())
}

fn project_direction(g: &Theta) -> Theta {
    let n = trace_normal();
    g - n * (n.dot(g) / n.norm_squared())
}

const INITIAL_DELTA: f64 = 0.1;
const DELTA_SHRINK: f64 = 0.7;
const STALL_WINDOW: usize = 50;

struct Run {
    best: Theta,
    best_value: f64,
    iterations: usize,
}

fn descend(
    basis: &ConstraintBasis,
    start: Theta,
    budget: usize,
    options: &SolverOptions,
    trace: &mut Vec<f64>,
) -> Result<Run> {
    let mut theta = normalize(&start);
    let mut run = Run {
        best: theta,
        best_value: f64::INFINITY,
        iterations: 0,
    };
    let mut delta = INITIAL_DELTA;
    let mut since_progress = 0;
    let mut polish_left: Option<usize> = None;
    while run.iterations < budget {
        let (value, g) = basis.evaluate(&theta)?;
        run.iterations += 1;
        if value < run.best_value {
            if value < run.best_value - 1e-3 * delta {
                since_progress = 0;
            }
            run.best_value = value;
            run.best = theta;
        }
        trace.push(run.best_value);
        if run.best_value < -options.feas_tol && polish_left.is_none() {
            polish_left = Some(options.polish_iters);
        }
        if let Some(left) = polish_left.as_mut() {
            if *left == 0 {
                break;
            }
            *left -= 1;
        }
        since_progress += 1;
        if since_progress >= STALL_WINDOW {
            delta *= DELTA_SHRINK;
            theta = run.best;
            since_progress = 0;
            continue;
        }
        let g = project_direction(&g);
        let g2 = g.norm_squared();
        if g2 == 0.0 || !g2.is_finite() {
            break;
        }
        let target = run.best_value - delta;
        theta -= g * ((value - target) / g2);
    }
    Ok(run)
}

fn random_start(rng: &mut ChaCha8Rng) -> Theta {
    let mut theta = Theta::from_fn(|_, _| rng.random_range(-1.0..1.0));
    // positive diagonal for P and R
    for i in [0, 2, 3, 5] {
        theta[i] = theta[i].abs() + 0.1;
    }
    theta
}

fn default_start() -> Theta {
    let mut theta = Theta::zeros();
    for i in [0, 2, 3, 5] {
        theta[i] = 0.5;
    }
    theta
}

/// Cold-start search; see [`find_certificate_from`].
pub fn find_certificate(params: &LmiParams, options: &SolverOptions) -> Result<FeasibilityReport> {
    find_certificate_from(params, options, None)
}

/// Searches for a certificate, starting from `warm` (rescaled to the trace
/// normalization) when given. Returns `Feasible` only if the best point
/// reaches `f < -feas_tol` and passes [`verify_certificate`].
pub fn find_certificate_from(
    params: &LmiParams,
    options: &SolverOptions,
    warm: Option<&DecisionVars>,
) -> Result<FeasibilityReport> {
    params.check_open_interval()?;
    let basis = ConstraintBasis::new(params);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let starts = options.restarts + 1;
    let per_start = (options.max_iters / starts).max(1);

    let mut trace = Vec::with_capacity(options.max_iters);
    let mut best: Option<Run> = None;
    let mut iterations = 0;
    for attempt in 0..starts {
        let start = match (attempt, warm) {
            (0, Some(w)) if w.trace_sum() > 0.0 => w.to_vector(),
            (0, _) => default_start(),
            _ => random_start(&mut rng),
        };
        let run = descend(&basis, start, per_start, options, &mut trace)?;
        iterations += run.iterations;
        let improved = best.as_ref().is_none_or(|b| run.best_value < b.best_value);
        if improved {
            best = Some(run);
        }
        if best
            .as_ref()
            .is_some_and(|b| b.best_value < -options.feas_tol)
        {
            break;
        }
    }
    let best = best.expect("at least one start");

    let mut report = FeasibilityReport {
        status: FeasibilityStatus::NoCertificateFound,
        certificate: None,
        objective_trace: trace,
        iterations,
        best_objective: best.best_value,
    };
    if best.best_value < -options.feas_tol {
        let mut cert = Certificate {
            vars: DecisionVars::from_vector(&best.best),
            params: *params,
            margin: 0.0,
        };
        let check = verify_certificate(&cert, options.feas_tol)?;
        if check.passed {
            cert.margin = check.margin;
            report.status = FeasibilityStatus::Feasible;
            report.certificate = Some(cert);
        }
    }
    Ok(report)
}
