//! Searches for a certificate at `(kp, kd, τ̄, λ̄)` given on the command line
//! (default `1 1 0.05 0.5`), verifies it, and round-trips it through TOML.

use consensus_lab::lmi::{
    find_certificate, verify_certificate, Certificate, LmiParams, SolverOptions,
};
use consensus_lab::ProtocolGains;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let [kp, kd, tau_bar, lambda_bar] = match args.as_slice() {
        [] => [1.0, 1.0, 0.05, 0.5],
        &[a, b, c, d] => [a, b, c, d],
        _ => return Err("expected: kp kd tau_bar lambda_bar".into()),
    };
    let params = LmiParams::new(ProtocolGains::new(kp, kd)?, tau_bar, lambda_bar)?;
    let report = find_certificate(&params, &SolverOptions::default())?;
    println!("{}", report.summary());
    let Some(cert) = report.certificate else {
        return Ok(());
    };
    let text = cert.to_toml();
    print!("{text}");
    let back = Certificate::from_toml(&text)?;
    assert_eq!(back, cert);
    let v = verify_certificate(&back, 1e-7)?;
    println!(
        "re-verified: passed = {}, margin = {:.3e}",
        v.passed, v.margin
    );
    Ok(())
}
