//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! `cargo test --release --test acceptance`

use std::time::{Duration, Instant};

use consensus_lab::dynamics::{
    consensus_metrics, generate_schedule, mode_samples, simulate_modal, simulate_rk4, uem_limit,
    SamplingSchedule,
};
use consensus_lab::graph::{modal_decomposition, random_connected_graph};
use consensus_lab::lmi::{
    assemble_lmis, embed, find_certificate, lyapunov_trace, psi, verify_certificate, Certificate,
    DecisionVars, LmiParams, SolverOptions, N_VARS,
};
use consensus_lab::region::{default_grid, stability_region, SweepOptions};
use consensus_lab::scenario::random_initial_state;
use consensus_lab::{Graph, ProtocolGains};
use nalgebra::{Matrix6, SVector, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn fixture_params() -> LmiParams {
    LmiParams::new(ProtocolGains::new(1.0, 1.0).unwrap(), 0.05, 0.5).unwrap()
}

fn fixture_certificate() -> Option<Certificate> {
    find_certificate(&fixture_params(), &SolverOptions::default())
        .ok()?
        .certificate
}

fn spectrum_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_excess = 0.0f64;
    let mut min_gap = f64::INFINITY;
    let mut max_top_err = 0.0f64;
    for seed in 0..200 {
        let n = rng.random_range(2..=12);
        let p = rng.random_range(0.05..0.9);
        let g = random_connected_graph(n, p, seed).unwrap();
        let s = modal_decomposition(&g).unwrap().spectrum().clone();
        for &l in s.iter() {
            worst_excess = worst_excess.max(l.abs() - 1.0);
        }
        max_top_err = max_top_err.max((s[0] - 1.0).abs());
        min_gap = min_gap.min(s[0] - s[1]);
    }
    Outcome::new(
        worst_excess <= 1e-9 && max_top_err <= 1e-9 && min_gap > 1e-9,
        format!(
            "200 graphs: max(|lambda|-1) = {worst_excess:.1e}, |lambda_1-1| <= {max_top_err:.1e}, min gap {min_gap:.3e}"
        ),
    )
}

fn convex_combination() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let theta = SVector::<f64, N_VARS>::from_fn(|_, _| rng.random_range(-2.0..2.0));
        let vars = DecisionVars::from_vector(&theta);
        let gains =
            ProtocolGains::new(rng.random_range(0.1..5.0), rng.random_range(0.1..5.0)).unwrap();
        let params = LmiParams::new(
            gains,
            rng.random_range(0.01..3.0),
            rng.random_range(-0.95..0.99),
        )
        .unwrap();
        let (a, b): (f64, f64) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
        let tau = a * params.tau_bar;
        let lambda = -1.0 + b * (params.lambda_bar + 1.0);
        let set = assemble_lmis(&vars, &params);
        let mixture: Matrix6<f64> = embed(&set.m1) * ((1.0 - a) * (1.0 - b))
            + embed(&set.m2) * ((1.0 - a) * b)
            + set.m3 * (a * (1.0 - b))
            + set.m4 * (a * b);
        let direct = psi(&vars, &params, tau, lambda).unwrap();
        let scale = direct.amax().max(mixture.amax());
        worst = worst.max((direct - mixture).amax() / scale);
    }
    Outcome::new(
        worst <= 1e-12,
        format!("1000 draws: max relative elementwise error {worst:.2e}"),
    )
}

fn certificate_fixture() -> Outcome {
    let Some(cert) = fixture_certificate() else {
        return Outcome::new(false, "no certificate at (1, 1, 0.05, 0.5)");
    };
    let first = verify_certificate(&cert, 1e-7).unwrap();
    let dir = std::env::temp_dir().join(format!("consensus-lab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("certificate.toml");
    cert.save(&path).unwrap();
    let back = Certificate::load(&path).unwrap();
    let _ = std::fs::remove_dir_all(&dir);
    let bitwise = back
        .vars
        .to_vector()
        .iter()
        .zip(cert.vars.to_vector().iter())
        .all(|(a, b)| a.to_bits() == b.to_bits())
        && back.margin.to_bits() == cert.margin.to_bits()
        && back.params == cert.params;
    let second = verify_certificate(&back, 1e-7).unwrap();
    Outcome::new(
        first.passed && first.margin >= 1e-7 && bitwise && second.passed && second == first,
        format!(
            "margin {:.3e}, file round trip bitwise = {bitwise}, re-verified = {}",
            first.margin, second.passed
        ),
    )
}

fn modal_vs_rk4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let n = rng.random_range(3..=10);
        let g = random_connected_graph(n, rng.random_range(0.2..0.7), seed).unwrap();
        let gains =
            ProtocolGains::new(rng.random_range(0.5..2.0), rng.random_range(0.5..2.0)).unwrap();
        let tau_bar = rng.random_range(0.05..0.3);
        let schedule = generate_schedule(tau_bar, 1e-3, 10.0, seed).unwrap();
        let x0 = random_initial_state(n, 1000 + seed);
        let basis = modal_decomposition(&g).unwrap();
        let exact = simulate_modal(&basis, &gains, &schedule, &x0, 0.05).unwrap();
        let rk4 = simulate_rk4(&g, &gains, &schedule, &x0, 1e-4, 0.05).unwrap();
        let (mut err, mut scale) = (0.0f64, 0.0f64);
        for (a, b) in exact.samples.iter().zip(&rk4.samples) {
            err = err.max((&a.x - &b.x).amax()).max((&a.v - &b.v).amax());
            scale = scale.max(a.x.amax()).max(a.v.amax());
        }
        worst = worst.max(err / scale);
    }
    Outcome::new(
        worst <= 1e-6,
        format!("20 instances over 10 s: max relative sup-norm error {worst:.2e}"),
    )
}

const REFERENCE_HORIZON: f64 = 2000.0;

fn reference_network() -> Outcome {
    let g = Graph::eight_agent_reference();
    let basis = modal_decomposition(&g).unwrap();
    let lambda_2 = basis.lambda2().unwrap();
    let gains = ProtocolGains::new(1.0, 1.0).unwrap();
    let tau_bar = 0.05;

    let params = LmiParams::new(gains, tau_bar, lambda_2).unwrap();
    let report = find_certificate(&params, &SolverOptions::default()).unwrap();
    let certified = report.is_feasible();

    let schedule = generate_schedule(tau_bar, 1e-3, REFERENCE_HORIZON, 1).unwrap();
    let x0 = random_initial_state(8, 1);
    let traj = simulate_modal(&basis, &gains, &schedule, &x0, 0.5).unwrap();
    let m = consensus_metrics(&traj).unwrap();
    let uem = uem_limit(&basis, &gains, &schedule, &x0, 1e-9);
    let gamma_err = uem
        .as_ref()
        .map(|u| (u.gamma - m.gamma_hat).abs())
        .unwrap_or(f64::INFINITY);
    let spread = m.final_position_spread();
    let speed = m.final_max_speed();
    let settled = spread < 1e-6 && speed < 1e-6 && gamma_err < 1e-6;
    Outcome::new(
        certified && settled,
        format!(
            "lambda_2 = {lambda_2:.5}, certificate at (tau_bar {tau_bar}, lambda_bar = lambda_2): {}; \
             at t = {REFERENCE_HORIZON}: spread {spread:.1e}, max|v| {speed:.1e}, |gamma_hat - gamma| {gamma_err:.1e}",
            if certified {
                "found".to_string()
            } else {
                format!("none (best objective {:.3e})", report.best_objective)
            }
        ),
    )
}

fn lyapunov_monitor() -> Outcome {
    let Some(cert) = fixture_certificate() else {
        return Outcome::new(false, "no fixture certificate");
    };
    let schedule = generate_schedule(cert.params.tau_bar, 1e-3, 80.0, 6).unwrap();
    let step = 1e-3;
    let mut ok = true;
    let mut notes = Vec::new();
    for lambda in [-1.0, 0.0, 0.5] {
        let trace = lyapunov_trace(&cert, lambda, &schedule, Vector2::new(1.0, 0.0), step).unwrap();
        let v = &trace.instant_values;
        let stop = v.iter().position(|&x| x < 1e-12).unwrap_or(v.len());
        let decreasing = stop < v.len() && v[..=stop].windows(2).all(|w| w[1] < w[0]);
        let mut max_rate = f64::NEG_INFINITY;
        for (i, w) in trace.values.windows(2).enumerate() {
            let (t0, t1) = (trace.times[i], trace.times[i + 1]);
            if schedule.interval_of(t0) == schedule.interval_of(t1)
                && schedule.instants()[schedule.interval_of(t1)] <= t0
            {
                max_rate = max_rate.max((w[1] - w[0]) / (t1 - t0));
            }
        }
        ok &= decreasing && max_rate <= 1e-10;
        notes.push(format!(
            "lambda {lambda:+}: V(t_k) decreasing to 1e-12 by t = {:.2} ({decreasing}), max intra-interval dV/dt {max_rate:.1e}",
            schedule.instants().get(stop).copied().unwrap_or(f64::NAN)
        ));
    }
    Outcome::new(ok, notes.join("; "))
}

fn region_sweep() -> Outcome {
    let gains = ProtocolGains::new(1.0, 1.0).unwrap();
    let opts = SweepOptions::default();
    let region = stability_region(&gains, &default_grid(), &opts).unwrap();
    let positive = region.points.iter().all(|p| p.tau_star > 0.0);
    let backed = region.points.iter().all(|p| {
        p.certificate
            .as_ref()
            .is_some_and(|c| verify_certificate(c, opts.solver.feas_tol).unwrap().passed)
    });
    let flagged: Vec<f64> = region
        .points
        .iter()
        .filter(|p| p.fragile)
        .map(|p| p.lambda_bar)
        .collect();
    let violations = region.monotonicity_violations();
    let monotone_or_flagged = violations.iter().all(|&i| region.points[i].fragile);
    let curve: Vec<String> = region
        .points
        .iter()
        .map(|p| format!("{:.1}:{:.3}", p.lambda_bar, p.tau_star))
        .collect();
    Outcome::new(
        positive && backed && monotone_or_flagged,
        format!(
            "tau* = [{}]; all positive = {positive}, all certificate-backed = {backed}, \
             non-increasing within tolerance = {}, fragile = {flagged:?}",
            curve.join(" "),
            violations.is_empty()
        ),
    )
}

fn instability_witness() -> Outcome {
    let gains = ProtocolGains::new(1.0, 1.0).unwrap();
    let params = LmiParams::new(gains, 10.0, 0.99).unwrap();
    let report = find_certificate(&params, &SolverOptions::default()).unwrap();
    let schedule = SamplingSchedule::periodic(10.0, 200.0).unwrap();
    let growth = |lambda: f64| {
        let ys = mode_samples(&gains, lambda, &schedule, Vector2::new(1.0, 0.0));
        (ys[0].norm(), ys[ys.len() - 1].norm())
    };
    let (start, end) = growth(0.99);
    let (_, end_neg) = growth(-1.0);
    let grows = end > start;
    Outcome::new(
        !report.is_feasible() && grows,
        format!(
            "no certificate = {} (best objective {:.3e}); lambda = 0.99 mode |y| {start:.3} -> {end:.3e} over 200 s; \
             lambda = -1 mode |y| {start:.3} -> {end_neg:.3e}",
            !report.is_feasible(),
            report.best_objective
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "C1 normalized spectrum bounds",
            spectrum_bounds,
            Duration::from_secs(10),
        ),
        (
            "C2 convex-combination identity",
            convex_combination,
            Duration::from_secs(5),
        ),
        (
            "C3 certificate fixture",
            certificate_fixture,
            Duration::from_secs(30),
        ),
        (
            "C4 exact flow vs RK4",
            modal_vs_rk4,
            Duration::from_secs(120),
        ),
        ("C5 8-agent consensus", reference_network, Duration::MAX),
        ("C6 Lyapunov monitor", lyapunov_monitor, Duration::MAX),
        (
            "C7 stability region sweep",
            region_sweep,
            Duration::from_secs(600),
        ),
        ("C8 instability witness", instability_witness, Duration::MAX),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < budget;
        let passed = outcome.passed && in_time;
        if !passed {
            failed += 1;
        }
        let budget_note = if budget == Duration::MAX {
            String::new()
        } else {
            format!(", budget {budget:?}")
        };
        println!(
            "{} {name}: {} ({:.2?}{budget_note})",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed
        );
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
