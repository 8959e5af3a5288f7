//! Certified stability region in the `(λ̄, τ̄)` plane.
//!
//! For each connectivity bound the largest certified sampling bound `τ̄*`
//! is located by bisection on the solver outcome, warm-starting from the
//! last certificate found.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::dynamics::ProtocolGains;
use crate::error::{Error, Result};
use crate::lmi::{
    find_certificate_from, verify_certificate, Certificate, LmiParams, SolverOptions,
};
use crate::plot::{Plot, Series};

/// Caps the worker threads used by [`stability_region`].
pub const THREADS_ENV: &str = "CONSENSUS_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Bisection resolution in seconds.
    pub bisect_tol: f64,
    /// Upper bracket; must admit no certificate.
    pub tau_hi: f64,
    pub solver: SolverOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            bisect_tol: 1e-3,
            tau_hi: 5.0,
            solver: SolverOptions::default(),
        }
    }
}

/// `{0.1, 0.2, …, 0.9}`
pub fn default_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauStar {
    pub lambda_bar: f64,
    pub tau_star: f64,
    /// Certificate at `tau_star`; absent when `tau_star = 0`.
    pub certificate: Option<Certificate>,
    pub iterations: usize,
    pub solves: usize,
}

pub fn max_certified_tau(
    gains: &ProtocolGains,
    lambda_bar: f64,
    opts: &SweepOptions,
) -> Result<TauStar> {
    if !(opts.bisect_tol > 0.0) {
        return Err(Error::param("bisect_tol must be positive"));
    }
    if !(opts.tau_hi > opts.bisect_tol) {
        return Err(Error::param("tau_hi must exceed bisect_tol"));
    }
    let mut iterations = 0;
    let mut solves = 0;
    let mut solve = |tau: f64, warm: Option<&Certificate>| -> Result<Option<Certificate>> {
        let params = LmiParams::new(*gains, tau, lambda_bar)?;
        let report = find_certificate_from(&params, &opts.solver, warm.map(|c| &c.vars))?;
        iterations += report.iterations;
        solves += 1;
        Ok(report.certificate)
    };

    if solve(opts.tau_hi, None)?.is_some() {
        return Err(Error::WidenBracket {
            tau_hi: opts.tau_hi,
        });
    }
    let Some(mut best) = solve(opts.bisect_tol, None)? else {
        return Ok(TauStar {
            lambda_bar,
            tau_star: 0.0,
            certificate: None,
            iterations,
            solves,
        });
    };
    let (mut lo, mut hi) = (opts.bisect_tol, opts.tau_hi);
    while hi - lo > opts.bisect_tol {
        let mid = 0.5 * (lo + hi);
        match solve(mid, Some(&best))? {
            Some(cert) => {
                lo = mid;
                best = cert;
            }
            None => hi = mid,
        }
    }
    Ok(TauStar {
        lambda_bar,
        tau_star: lo,
        certificate: Some(best),
        iterations,
        solves,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionPoint {
    pub lambda_bar: f64,
    pub tau_star: f64,
    pub margin: Option<f64>,
    /// Set when `τ̄*` exceeds the value at a smaller `λ̄` by more than the
    /// bisection tolerance, or when the certificate fails re-verification.
    pub fragile: bool,
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRegion {
    pub gains: ProtocolGains,
    pub points: Vec<RegionPoint>,
    pub tolerance: f64,
    pub solver: SolverOptions,
    pub total_iterations: usize,
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs [`max_certified_tau`] on every grid point (in parallel, capped by
/// `CONSENSUS_LAB_THREADS`) and flags non-monotone points.
pub fn stability_region(
    gains: &ProtocolGains,
    grid: &[f64],
    opts: &SweepOptions,
) -> Result<StabilityRegion> {
    for w in grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::param("lambda grid must be strictly increasing"));
        }
    }
    if let Some(&bad) = grid.iter().find(|&&l| !(l > -1.0 && l < 1.0)) {
        return Err(Error::param(format!("grid value {bad} outside (-1, 1)")));
    }
    let run = || {
        grid.par_iter()
            .map(|&l| max_certified_tau(gains, l, opts))
            .collect::<Vec<_>>()
    };
    let results = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::param(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut points = Vec::with_capacity(grid.len());
    let mut total_iterations = 0;
    let mut running_min = f64::INFINITY;
    for res in results {
        let ts = res?;
        total_iterations += ts.iterations;
        let reverified = match &ts.certificate {
            Some(c) => verify_certificate(c, opts.solver.feas_tol)?.passed,
            None => true,
        };
        let fragile = ts.tau_star > running_min + opts.bisect_tol || !reverified;
        running_min = running_min.min(ts.tau_star);
        points.push(RegionPoint {
            lambda_bar: ts.lambda_bar,
            tau_star: ts.tau_star,
            margin: ts.certificate.map(|c| c.margin),
            fragile,
            certificate: ts.certificate,
        });
    }
    Ok(StabilityRegion {
        gains: *gains,
        points,
        tolerance: opts.bisect_tol,
        solver: opts.solver,
        total_iterations,
    })
}

impl StabilityRegion {
    /// `lambda_bar,tau_star,margin,fragile`; a missing margin is written as `NaN`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda_bar,tau_star,margin,fragile\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{}",
                p.lambda_bar,
                p.tau_star,
                p.margin.unwrap_or(f64::NAN),
                p.fragile
            );
        }
        out
    }

    pub fn to_svg(&self) -> String {
        let pts = self
            .points
            .iter()
            .map(|p| (p.lambda_bar, p.tau_star))
            .collect();
        let mut plot = Plot::new(
            format!(
                "Certified stability region (kp = {}, kd = {})",
                self.gains.kp(),
                self.gains.kd()
            ),
            "connectivity bound lambda_bar",
            "max sampling interval tau_bar* [s]",
        )
        .with_series(Series::line("tau*", pts));
        plot.shade_under = true;
        plot.to_svg()
    }

    /// Indices of points whose `τ̄*` rises above an earlier point by more than
    /// the tolerance.
    pub fn monotonicity_violations(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut running_min = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            if p.tau_star > running_min + self.tolerance {
                out.push(i);
            }
            running_min = running_min.min(p.tau_star);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        let g = ProtocolGains::new(1.0, 1.0).unwrap();
        let opts = SweepOptions::default();
        assert!(stability_region(&g, &[0.5, 0.4], &opts).is_err());
        assert!(stability_region(&g, &[1.0], &opts).is_err());
    }

    #[test]
    fn bracket_errors() {
        let g = ProtocolGains::new(1.0, 1.0).unwrap();
        let opts = SweepOptions {
            tau_hi: 0.05,
            ..Default::default()
        };
        assert!(matches!(
            max_certified_tau(&g, 0.5, &opts),
            Err(Error::WidenBracket { .. })
        ));
        let opts = SweepOptions {
            bisect_tol: 0.0,
            ..Default::default()
        };
        assert!(max_certified_tau(&g, 0.5, &opts).is_err());
    }

    #[test]
    fn default_grid_has_nine_points() {
        let g = default_grid();
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[8], 0.9);
    }
}
