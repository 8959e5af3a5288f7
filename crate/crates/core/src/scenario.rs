//! Simulation scenarios loaded from TOML.
//!
//! ```toml
//! graph-path = "graph.txt"        # or "random:<n>:<edge_prob>:<seed>", or "reference"
//! kp = 1.0
//! kd = 1.0
//! tau_bar = 0.05
//! min_gap = 0.001
//! horizon = 2000.0
//! seed = 1
//! initial-state = "random:5"      # or { x = [...], v = [...] }
//! output-step = 0.5               # optional
//! ```
//!
//! Relative graph paths resolve against the scenario file's directory.

use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::dynamics::{
    generate_schedule, NetworkState, ProtocolGains, SamplingSchedule, DEFAULT_MIN_GAP,
};
use crate::error::{Error, Result};
use crate::graph::{is_connected, random_connected_graph, Graph};

pub const DEFAULT_OUTPUT_STEP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    /// `"random:<seed>"`
    Random(String),
    Explicit {
        x: Vec<f64>,
        v: Vec<f64>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(rename = "graph-path")]
    graph_path: String,
    kp: f64,
    kd: f64,
    tau_bar: f64,
    #[serde(default = "default_min_gap")]
    min_gap: f64,
    horizon: f64,
    seed: u64,
    #[serde(rename = "initial-state")]
    initial_state: InitialSpec,
    #[serde(rename = "output-step", default = "default_output_step")]
    output_step: f64,
}

fn default_min_gap() -> f64 {
    DEFAULT_MIN_GAP
}

fn default_output_step() -> f64 {
    DEFAULT_OUTPUT_STEP
}

/// A validated, fully resolved scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub graph_source: String,
    pub graph: Graph,
    pub gains: ProtocolGains,
    pub tau_bar: f64,
    pub min_gap: f64,
    pub horizon: f64,
    pub seed: u64,
    pub initial: NetworkState,
    pub output_step: f64,
}

/// Positions uniform in `[-10, 10]`, velocities uniform in `[-1, 1]`.
pub fn random_initial_state(n: usize, seed: u64) -> NetworkState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DVector::from_fn(n, |_, _| rng.random_range(-10.0..=10.0));
    let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
    NetworkState { t: 0.0, x, v }
}

fn resolve_graph(source: &str, base: &Path) -> Result<Graph> {
    if source == "reference" {
        return Ok(Graph::eight_agent_reference());
    }
    if let Some(spec) = source.strip_prefix("random:") {
        let parts: Vec<&str> = spec.split(':').collect();
        let [n, p, seed] = parts.as_slice() else {
            return Err(Error::parse(
                "graph-path",
                "expected random:<n>:<edge_prob>:<seed>",
            ));
        };
        let n = n.parse().map_err(|e| Error::parse("graph-path n", e))?;
        let p = p
            .parse()
            .map_err(|e| Error::parse("graph-path edge_prob", e))?;
        let seed = seed
            .parse()
            .map_err(|e| Error::parse("graph-path seed", e))?;
        return random_connected_graph(n, p, seed);
    }
    let path = base.join(source);
    Graph::load(path)
}

fn resolve_initial(spec: &InitialSpec, n: usize) -> Result<NetworkState> {
    match spec {
        InitialSpec::Random(s) => {
            let seed = s
                .strip_prefix("random:")
                .ok_or_else(|| Error::parse("initial-state", format!("unrecognized spec {s:?}")))?
                .parse()
                .map_err(|e| Error::parse("initial-state seed", e))?;
            Ok(random_initial_state(n, seed))
        }
        InitialSpec::Explicit { x, v } => {
            if x.len() != n || v.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    actual: if x.len() != n { x.len() } else { v.len() },
                });
            }
            NetworkState::new(
                0.0,
                DVector::from_vec(x.clone()),
                DVector::from_vec(v.clone()),
            )
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| Error::parse("scenario", e))?;
        let graph = resolve_graph(&raw.graph_path, base_dir)?;
        if !is_connected(&graph) {
            return Err(Error::Disconnected);
        }
        let gains = ProtocolGains::new(raw.kp, raw.kd)?;
        let initial = resolve_initial(&raw.initial_state, graph.n())?;
        let scenario = Scenario {
            graph_source: raw.graph_path,
            graph,
            gains,
            tau_bar: raw.tau_bar,
            min_gap: raw.min_gap,
            horizon: raw.horizon,
            seed: raw.seed,
            initial,
            output_step: raw.output_step,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Scenario::from_toml(&text, &base)
    }

    /// The 8-agent reference topology with unit gains.
    pub fn reference() -> Self {
        let graph = Graph::eight_agent_reference();
        Scenario {
            graph_source: "reference".into(),
            initial: random_initial_state(graph.n(), 1),
            graph,
            gains: ProtocolGains::new(1.0, 1.0).expect("unit gains"),
            tau_bar: 0.05,
            min_gap: DEFAULT_MIN_GAP,
            horizon: 2000.0,
            seed: 1,
            output_step: DEFAULT_OUTPUT_STEP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_gap > 0.0 && self.min_gap < self.tau_bar) {
            return Err(Error::param(format!(
                "need 0 < min_gap < tau_bar, got {} and {}",
                self.min_gap, self.tau_bar
            )));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::param("horizon must be positive"));
        }
        if !(self.output_step > 0.0) {
            return Err(Error::param("output-step must be positive"));
        }
        if self.initial.n() != self.graph.n() {
            return Err(Error::Dimension {
                expected: self.graph.n(),
                actual: self.initial.n(),
            });
        }
        Ok(())
    }

    pub fn schedule(&self) -> Result<SamplingSchedule> {
        generate_schedule(self.tau_bar, self.min_gap, self.horizon, self.seed)
    }
}
