use consensus_lab::dynamics::{generate_schedule, mode_samples};
use consensus_lab::lmi::{
    find_certificate, find_certificate_from, psi, verify_certificate, Certificate, LmiParams,
    SolverOptions,
};
use consensus_lab::ProtocolGains;
use nalgebra::Vector2;

fn fixture() -> Certificate {
    let params = LmiParams::new(ProtocolGains::new(1.0, 1.0).unwrap(), 0.05, 0.5).unwrap();
    find_certificate(&params, &SolverOptions::default())
        .unwrap()
        .certificate
        .expect("fixture is feasible")
}

#[test]
fn certificate_bounds_psi_on_a_grid() {
    let cert = fixture();
    let p = cert.params;
    for i in 0..=20 {
        let tau = p.tau_bar * i as f64 / 20.0;
        for j in 0..=20 {
            let lambda = -1.0 + (p.lambda_bar + 1.0) * j as f64 / 20.0;
            let m = psi(&cert.vars, &p, tau, lambda).unwrap();
            let top = if i == 0 {
                m.fixed_view::<4, 4>(0, 0)
                    .into_owned()
                    .symmetric_eigen()
                    .eigenvalues
                    .max()
            } else {
                m.symmetric_eigen().eigenvalues.max()
            };
            assert!(top < 0.0, "tau = {tau}, lambda = {lambda}: max eig {top}");
        }
    }
}

#[test]
fn certified_modes_decay_on_random_schedules() {
    let cert = fixture();
    let gains = cert.params.gains;
    for seed in 0..5 {
        let schedule = generate_schedule(cert.params.tau_bar, 1e-3, 200.0, seed).unwrap();
        for lambda in [-1.0, 0.0, cert.params.lambda_bar] {
            let ys = mode_samples(&gains, lambda, &schedule, Vector2::new(1.0, -0.5));
            let last = ys.last().unwrap().norm();
            assert!(
                last < 1e-6,
                "lambda = {lambda}, seed = {seed}: |y| = {last}"
            );
        }
    }
}

#[test]
fn warm_start_reaches_neighbouring_point() {
    let cert = fixture();
    let opts = SolverOptions::default();
    let next = LmiParams::new(cert.params.gains, 0.1, 0.5).unwrap();
    let cold = find_certificate(&next, &opts).unwrap();
    let warm = find_certificate_from(&next, &opts, Some(&cert.vars)).unwrap();
    assert!(cold.is_feasible() && warm.is_feasible());
    assert!(
        warm.iterations <= cold.iterations,
        "warm {} vs cold {}",
        warm.iterations,
        cold.iterations
    );
    assert!(
        verify_certificate(warm.certificate.as_ref().unwrap(), opts.feas_tol)
            .unwrap()
            .passed
    );
}

#[test]
fn solver_is_deterministic_for_a_seed() {
    let params = LmiParams::new(ProtocolGains::new(2.0, 1.0).unwrap(), 0.2, 0.3).unwrap();
    let opts = SolverOptions {
        seed: 11,
        ..SolverOptions::default()
    };
    let a = find_certificate(&params, &opts).unwrap();
    let b = find_certificate(&params, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn certificate_file_round_trip() {
    let cert = fixture();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    cert.save(&path).unwrap();
    let back = Certificate::load(&path).unwrap();
    assert_eq!(back, cert);
    assert_eq!(
        verify_certificate(&back, 1e-7).unwrap(),
        verify_certificate(&cert, 1e-7).unwrap()
    );
}
