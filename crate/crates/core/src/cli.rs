//! Command-line front end.
//!
//! Exit codes: 0 success (or certificate found), 1 no certificate found,
//! 2 invalid input or I/O failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dynamics::{
    consensus_metrics, sampled_states, simulate_modal, uem_limit, NetworkState, ProtocolGains,
};
use crate::error::{Error, Result};
use crate::graph::{modal_decomposition, random_connected_graph, Graph};
use crate::lmi::{find_certificate, verify_certificate, Certificate, LmiParams, SolverOptions};
use crate::plot::{Plot, Series};
use crate::region::{default_grid, stability_region, SweepOptions};
use crate::scenario::Scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_CERTIFICATE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "consensus-lab",
    version,
    about = "Sampled-data PD consensus: simulate, certify, sweep"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a scenario and write trajectories, metrics and plots.
    Simulate(SimulateArgs),
    /// Search for an LMI stability certificate at one parameter point.
    Certify(CertifyArgs),
    /// Sweep the certified stability region over a grid of connectivity bounds.
    Sweep(SweepArgs),
    /// Write a random connected graph in the plain-text adjacency format.
    GraphGen(GraphGenArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Scenario TOML; the built-in 8-agent scenario is used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Graph file, overriding the scenario's graph source.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    kp: Option<f64>,
    #[arg(long)]
    kd: Option<f64>,
    #[arg(long = "tau-bar")]
    tau_bar: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Schedule seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Start from consensus at this position (zero velocities).
    #[arg(long = "consensus-at")]
    consensus_at: Option<f64>,
    /// Time span shown in the SVG plots.
    #[arg(long = "plot-window", default_value_t = 20.0)]
    plot_window: f64,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "max-iters", default_value_t = SolverOptions::default().max_iters)]
    max_iters: usize,
    #[arg(long, default_value_t = SolverOptions::default().restarts)]
    restarts: usize,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            seed: self.seed,
            max_iters: self.max_iters,
            restarts: self.restarts,
            ..SolverOptions::default()
        }
    }
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[arg(long, default_value_t = 1.0)]
    kp: f64,
    #[arg(long, default_value_t = 1.0)]
    kd: f64,
    #[arg(long = "tau-bar")]
    tau_bar: f64,
    #[arg(long = "lambda-bar")]
    lambda_bar: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 1.0)]
    kp: f64,
    #[arg(long, default_value_t = 1.0)]
    kd: f64,
    /// Comma-separated λ̄ values, or `start:step:stop`. Defaults to 0.1..0.9.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long = "bisect-tol", default_value_t = SweepOptions::default().bisect_tol)]
    bisect_tol: f64,
    #[arg(long = "tau-hi", default_value_t = SweepOptions::default().tau_hi)]
    tau_hi: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct GraphGenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "edge-prob", default_value_t = 0.3)]
    edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the selected verb.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Certify(a) => certify(a),
        Command::Sweep(a) => sweep(a),
        Command::GraphGen(a) => graph_gen(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn agent_series(
    states: &[&NetworkState],
    n: usize,
    pick: fn(&NetworkState, usize) -> f64,
    steps: bool,
) -> Vec<Series> {
    (0..n)
        .map(|i| {
            let pts = states.iter().map(|s| (s.t, pick(s, i))).collect();
            let label = format!("agent {}", i + 1);
            if steps {
                Series::steps(label, pts)
            } else {
                Series::line(label, pts)
            }
        })
        .collect()
}

fn plot(title: &str, y_label: &str, series: Vec<Series>) -> String {
    Plot {
        title: title.into(),
        x_label: "t [s]".into(),
        y_label: y_label.into(),
        series,
        shade_under: false,
    }
    .to_svg()
}

fn simulate(a: SimulateArgs) -> Result<i32> {
    let mut sc = match &a.config {
        Some(path) => Scenario::load(path)?,
        None => Scenario::reference(),
    };
    if let Some(path) = &a.graph {
        sc.graph = Graph::load(path)?;
        sc.graph_source = path.display().to_string();
    }
    if a.kp.is_some() || a.kd.is_some() {
        sc.gains =
            ProtocolGains::new(a.kp.unwrap_or(sc.gains.kp()), a.kd.unwrap_or(sc.gains.kd()))?;
    }
    if let Some(t) = a.tau_bar {
        sc.tau_bar = t;
    }
    if let Some(h) = a.horizon {
        sc.horizon = h;
    }
    if let Some(s) = a.seed {
        sc.seed = s;
    }
    if let Some(c) = a.consensus_at {
        sc.initial = NetworkState::consensus(sc.graph.n(), c);
    }
    if sc.initial.n() != sc.graph.n() {
        sc.initial = crate::scenario::random_initial_state(sc.graph.n(), sc.seed);
    }
    sc.validate()?;
    if !(a.plot_window > 0.0) {
        return Err(Error::param("plot-window must be positive"));
    }

    let basis = modal_decomposition(&sc.graph)?;
    let schedule = sc.schedule()?;
    let traj = simulate_modal(&basis, &sc.gains, &schedule, &sc.initial, sc.output_step)?;
    let metrics = consensus_metrics(&traj)?;
    let samples = sampled_states(&basis, &sc.gains, &schedule, &sc.initial)?;

    create_dir(&a.out_dir)?;
    write(&a.out_dir, "trajectory.csv", &traj.to_csv())?;
    write(&a.out_dir, "metrics.csv", &metrics.to_csv())?;
    write(&a.out_dir, "schedule.csv", &schedule.to_csv())?;

    let n = sc.graph.n();
    let shown: Vec<&NetworkState> = traj
        .samples
        .iter()
        .filter(|s| s.t <= a.plot_window)
        .collect();
    let held: Vec<&NetworkState> = samples.iter().filter(|s| s.t <= a.plot_window).collect();
    let x = |s: &NetworkState, i: usize| s.x[i];
    let v = |s: &NetworkState, i: usize| s.v[i];
    write(
        &a.out_dir,
        "positions.svg",
        &plot("Positions", "x", agent_series(&shown, n, x, false)),
    )?;
    write(
        &a.out_dir,
        "velocities.svg",
        &plot("Velocities", "v", agent_series(&shown, n, v, false)),
    )?;
    write(
        &a.out_dir,
        "sampled_positions.svg",
        &plot(
            "Transmitted positions",
            "x(t_k)",
            agent_series(&held, n, x, true),
        ),
    )?;
    write(
        &a.out_dir,
        "sampled_velocities.svg",
        &plot(
            "Transmitted velocities",
            "v(t_k)",
            agent_series(&held, n, v, true),
        ),
    )?;

    println!(
        "graph: {} ({} agents), lambda_2 = {:.6}",
        sc.graph_source,
        n,
        basis.lambda2().unwrap_or(f64::NAN)
    );
    println!(
        "schedule: {} instants, tau_bar = {}, horizon = {}",
        schedule.len(),
        sc.tau_bar,
        schedule.end()
    );
    println!(
        "final position disagreement: {:.6e}",
        metrics.final_position_spread()
    );
    println!("final max speed: {:.6e}", metrics.final_max_speed());
    println!("gamma_hat: {:.12}", metrics.gamma_hat);
    match uem_limit(&basis, &sc.gains, &schedule, &sc.initial, 1e-9) {
        Ok(u) => println!("UEM gamma: {:.12}", u.gamma),
        Err(e) => println!("UEM gamma: unavailable ({e})"),
    }
    println!("wrote {}", a.out_dir.display());
    Ok(EXIT_OK)
}

fn certificate_report(cert: &Certificate) -> Result<String> {
    let v = verify_certificate(cert, 0.0)?;
    Ok(format!(
        "kp = {}\nkd = {}\ntau_bar = {}\nlambda_bar = {}\nmin eig P = {:.6e}\nmin eig R = {:.6e}\n\
         max eig M1..M4 = {:.6e} {:.6e} {:.6e} {:.6e}\nmargin = {:.6e}\n",
        cert.params.gains.kp(),
        cert.params.gains.kd(),
        cert.params.tau_bar,
        cert.params.lambda_bar,
        v.min_eig_p,
        v.min_eig_r,
        v.max_eig_m[0],
        v.max_eig_m[1],
        v.max_eig_m[2],
        v.max_eig_m[3],
        v.margin
    ))
}

fn certify(a: CertifyArgs) -> Result<i32> {
    let gains = ProtocolGains::new(a.kp, a.kd)?;
    let params = LmiParams::new(gains, a.tau_bar, a.lambda_bar)?;
    let report = find_certificate(&params, &a.solver.options())?;
    create_dir(&a.out_dir)?;
    let mut text = format!("{}\n", report.summary());
    let code = match &report.certificate {
        Some(cert) => {
            let path = a.out_dir.join("certificate.toml");
            cert.save(&path)?;
            text.push_str(&certificate_report(cert)?);
            let reloaded = Certificate::load(&path)?;
            let ok = verify_certificate(&reloaded, a.solver.options().feas_tol)?.passed;
            text.push_str(&format!(
                "file re-verification: {}\n",
                if ok { "passed" } else { "FAILED" }
            ));
            EXIT_OK
        }
        None => EXIT_NO_CERTIFICATE,
    };
    write(&a.out_dir, "report.txt", &text)?;
    print!("{text}");
    Ok(code)
}

/// `"0.1,0.2"` or `"start:step:stop"` (inclusive, with a half-step guard).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> { s.trim().parse().map_err(|e| Error::parse("grid", e)) };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, step, stop] = parts.as_slice() else {
            return Err(Error::parse("grid", "expected start:step:stop"));
        };
        let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
        if !(step > 0.0) || stop < start {
            return Err(Error::parse("grid", "need step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 0.5).floor() as usize;
        return Ok((0..=count).map(|k| start + k as f64 * step).collect());
    }
    spec.split(',').map(num).collect()
}

fn sweep(a: SweepArgs) -> Result<i32> {
    let gains = ProtocolGains::new(a.kp, a.kd)?;
    let grid = match &a.grid {
        Some(g) => parse_grid(g)?,
        None => default_grid(),
    };
    let opts = SweepOptions {
        bisect_tol: a.bisect_tol,
        tau_hi: a.tau_hi,
        solver: a.solver.options(),
    };
    let region = stability_region(&gains, &grid, &opts)?;
    create_dir(&a.out_dir)?;
    write(&a.out_dir, "region.csv", &region.to_csv())?;
    write(&a.out_dir, "region.svg", &region.to_svg())?;
    let cert_dir = a.out_dir.join("certificates");
    create_dir(&cert_dir)?;
    for p in &region.points {
        if let Some(c) = &p.certificate {
            c.save(cert_dir.join(format!("lambda_{}.toml", p.lambda_bar)))?;
        }
    }
    print!("{}", region.to_csv());
    let flagged = region.points.iter().filter(|p| p.fragile).count();
    if flagged > 0 {
        println!("{flagged} point(s) flagged fragile");
    }
    Ok(EXIT_OK)
}

fn graph_gen(a: GraphGenArgs) -> Result<i32> {
    let g = random_connected_graph(a.n, a.edge_prob, a.seed)?;
    match &a.out {
        Some(path) => g.save(path)?,
        None => print!("{}", g.to_text()),
    }
    Ok(EXIT_OK)
}
