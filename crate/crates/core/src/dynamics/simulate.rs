use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DVector, Matrix2, Vector2};

use super::{HeldFlow, ProtocolGains, SamplingSchedule};
use crate::error::{Error, Result};
use crate::graph::{weighted_adjacency, Graph, ModalBasis};

/// Positions and velocities of all agents at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub t: f64,
    pub x: DVector<f64>,
    pub v: DVector<f64>,
}

impl NetworkState {
    pub fn new(t: f64, x: DVector<f64>, v: DVector<f64>) -> Result<Self> {
        if x.len() != v.len() {
            return Err(Error::Dimension {
                expected: x.len(),
                actual: v.len(),
            });
        }
        Ok(NetworkState { t, x, v })
    }

    /// Every agent at position `c` with zero velocity.
    pub fn consensus(n: usize, c: f64) -> Self {
        NetworkState {
            t: 0.0,
            x: DVector::from_element(n, c),
            v: DVector::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub gains: ProtocolGains,
    pub tau_bar: f64,
    pub seed: Option<u64>,
}

/// Time-ordered network states.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<NetworkState>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn n(&self) -> usize {
        self.samples.first().map_or(0, NetworkState::n)
    }

    pub fn last(&self) -> Option<&NetworkState> {
        self.samples.last()
    }

    /// Header `t,x1..xn,v1..vn`, one row per sample, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let n = self.n();
        let mut out = String::from("t");
        for i in 1..=n {
            let _ = write!(out, ",x{i}");
        }
        for i in 1..=n {
            let _ = write!(out, ",v{i}");
        }
        out.push('\n');
        for s in &self.samples {
            let _ = write!(out, "{:.16e}", s.t);
            for value in s.x.iter().chain(s.v.iter()) {
                let _ = write!(out, ",{value:.16e}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`Self::to_csv`] output back into states (metadata is not
    /// part of the CSV and must be supplied).
    pub fn parse_csv(text: &str, meta: TrajectoryMeta) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::parse("trajectory", "missing header"))?;
        let columns = header.split(',').count();
        if columns < 3 || columns % 2 == 0 {
            return Err(Error::parse("trajectory header", header));
        }
        let n = (columns - 1) / 2;
        let mut samples = Vec::new();
        for (row, line) in lines.enumerate() {
            let values = line
                .split(',')
                .map(|tok| tok.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(format!("trajectory row {}", row + 1), e))?;
            if values.len() != columns {
                return Err(Error::Dimension {
                    expected: columns,
                    actual: values.len(),
                });
            }
            samples.push(NetworkState {
                t: values[0],
                x: DVector::from_column_slice(&values[1..=n]),
                v: DVector::from_column_slice(&values[n + 1..]),
            });
        }
        Ok(Trajectory { samples, meta })
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Exact trajectory of a single decoupled mode `y = (z, ż)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrajectory {
    pub lambda: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vector2<f64>>,
}

fn output_times(step: f64, end: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param(format!(
            "output step must be positive, got {step}"
        )));
    }
    let count = (end / step).floor() as usize;
    let mut times: Vec<f64> = (0..=count).map(|j| j as f64 * step).collect();
    while times.last().is_some_and(|&t| t > end) {
        times.pop();
    }
    Ok(times)
}

fn check_dims(basis_n: usize, initial: &NetworkState) -> Result<()> {
    if initial.x.len() != basis_n || initial.v.len() != basis_n {
        return Err(Error::Dimension {
            expected: basis_n,
            actual: initial.x.len().max(initial.v.len()),
        });
    }
    Ok(())
}

/// Modal state `(z_i, ż_i)` of every mode at every sampling instant.
fn modal_states_at_instants(
    basis: &ModalBasis,
    gains: &ProtocolGains,
    schedule: &SamplingSchedule,
    initial: &NetworkState,
) -> Vec<Vec<Vector2<f64>>> {
    let z = basis.to_modal(&initial.x);
    let w = basis.to_modal(&initial.v);
    let lambda_b: Vec<Matrix2<f64>> = basis.spectrum().iter().map(|&l| gains.b() * l).collect();
    let mut current: Vec<Vector2<f64>> = (0..basis.n()).map(|i| Vector2::new(z[i], w[i])).collect();
    let mut out = Vec::with_capacity(schedule.len());
    out.push(current.clone());
    for gap in schedule.gaps() {
        let flow = HeldFlow::new(gains, gap);
        for (y, lb) in current.iter_mut().zip(&lambda_b) {
            *y = flow.transition(lb) * *y;
        }
        out.push(current.clone());
    }
    out
}

fn to_network(basis: &ModalBasis, t: f64, modes: &[Vector2<f64>]) -> NetworkState {
    let z = DVector::from_iterator(modes.len(), modes.iter().map(|y| y[0]));
    let w = DVector::from_iterator(modes.len(), modes.iter().map(|y| y[1]));
    NetworkState {
        t,
        x: basis.from_modal(&z),
        v: basis.from_modal(&w),
    }
}

/// Simulates the network in modal coordinates with the exact hold-interval
/// flow. Output times `j·output_step` up to the last sampling instant are
/// evaluated from the sample at the start of their own hold interval, so no
/// output ever interpolates across a sampling instant.
pub fn simulate_modal(
    basis: &ModalBasis,
    gains: &ProtocolGains,
    schedule: &SamplingSchedule,
    initial: &NetworkState,
    output_step: f64,
) -> Result<Trajectory> {
    check_dims(basis.n(), initial)?;
    let times = output_times(output_step, schedule.end())?;
    let at_instants = modal_states_at_instants(basis, gains, schedule, initial);
    let lambda_b: Vec<Matrix2<f64>> = basis.spectrum().iter().map(|&l| gains.b() * l).collect();
    let instants = schedule.instants();

    let mut samples = Vec::with_capacity(times.len());
    for &t in &times {
        if t == 0.0 {
            samples.push(NetworkState {
                t,
                x: initial.x.clone(),
                v: initial.v.clone(),
            });
            continue;
        }
        let k = schedule.interval_of(t);
        let held = &at_instants[k];
        let dt = t - instants[k];
        let modes: Vec<Vector2<f64>> = if dt == 0.0 {
            held.clone()
        } else {
            let flow = HeldFlow::new(gains, dt);
            held.iter()
                .zip(&lambda_b)
                .map(|(y, lb)| flow.transition(lb) * y)
                .collect()
        };
        samples.push(to_network(basis, t, &modes));
    }
    Ok(Trajectory {
        samples,
        meta: TrajectoryMeta {
            gains: *gains,
            tau_bar: schedule.tau_bar(),
            seed: None,
        },
    })
}

/// Network states at each sampling instant, i.e. the values transmitted to
/// neighbours.
pub fn sampled_states(
    basis: &ModalBasis,
    gains: &ProtocolGains,
    schedule: &SamplingSchedule,
    initial: &NetworkState,
) -> Result<Vec<NetworkState>> {
    check_dims(basis.n(), initial)?;
    let at_instants = modal_states_at_instants(basis, gains, schedule, initial);
    Ok(schedule
        .instants()
        .iter()
        .zip(&at_instants)
        .map(|(&t, modes)| to_network(basis, t, modes))
        .collect())
}

/// Classical RK4 on the coupled network equations with the neighbour term
/// frozen at the last sample. Steps are clipped so they never straddle a
/// sampling instant or an output time.
pub fn simulate_rk4(
    g: &Graph,
    gains: &ProtocolGains,
    schedule: &SamplingSchedule,
    initial: &NetworkState,
    dt: f64,
    output_step: f64,
) -> Result<Trajectory> {
    check_dims(g.n(), initial)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param(format!("dt must be positive, got {dt}")));
    }
    let w = weighted_adjacency(g)?;
    let times = output_times(output_step, schedule.end())?;
    let (kp, kd) = (gains.kp(), gains.kd());

    let mut x = initial.x.clone();
    let mut v = initial.v.clone();
    let mut samples = Vec::with_capacity(times.len());
    let mut next_out = 0;
    let instants = schedule.instants();
    // snapping distance for events that fall within rounding of a step end
    let snap = 1e-9 * dt;

    let mut emit = |t: f64, x: &DVector<f64>, v: &DVector<f64>, next_out: &mut usize| {
        while *next_out < times.len() && (times[*next_out] - t).abs() <= snap {
            samples.push(NetworkState {
                t: times[*next_out],
                x: x.clone(),
                v: v.clone(),
            });
            *next_out += 1;
        }
    };
    emit(0.0, &x, &v, &mut next_out);

    for k in 0..instants.len() - 1 {
        let (t_start, t_end) = (instants[k], instants[k + 1]);
        let drive = (&w * &x) * kp + (&w * &v) * kd;
        let accel = |x: &DVector<f64>, v: &DVector<f64>| &drive - x * kp - v * kd;
        let mut t = t_start;
        while t_end - t > snap {
            let mut target = (t + dt).min(t_end);
            if next_out < times.len() && times[next_out] < target - snap {
                target = times[next_out];
            }
            if t_end - target <= snap {
                target = t_end;
            }
            let h = target - t;
            let (k1x, k1v) = (v.clone(), accel(&x, &v));
            let (x2, v2) = (&x + &k1x * (h / 2.0), &v + &k1v * (h / 2.0));
            let (k2x, k2v) = (v2.clone(), accel(&x2, &v2));
            let (x3, v3) = (&x + &k2x * (h / 2.0), &v + &k2v * (h / 2.0));
            let (k3x, k3v) = (v3.clone(), accel(&x3, &v3));
            let (x4, v4) = (&x + &k3x * h, &v + &k3v * h);
            let (k4x, k4v) = (v4.clone(), accel(&x4, &v4));
            x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
            v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
            t = target;
            emit(t, &x, &v, &mut next_out);
        }
    }
    Ok(Trajectory {
        samples,
        meta: TrajectoryMeta {
            gains: *gains,
            tau_bar: schedule.tau_bar(),
            seed: None,
        },
    })
}

/// Mode state at every sampling instant under `ẏ = A y + λ B y(t_k)`.
pub fn mode_samples(
    gains: &ProtocolGains,
    lambda: f64,
    schedule: &SamplingSchedule,
    y0: Vector2<f64>,
) -> Vec<Vector2<f64>> {
    let lb = gains.b() * lambda;
    let mut y = y0;
    let mut out = Vec::with_capacity(schedule.len());
    out.push(y);
    for gap in schedule.gaps() {
        y = HeldFlow::new(gains, gap).transition(&lb) * y;
        out.push(y);
    }
    out
}

/// Exact single-mode trajectory on the grid `j·output_step`.
pub fn simulate_mode(
    gains: &ProtocolGains,
    lambda: f64,
    schedule: &SamplingSchedule,
    y0: Vector2<f64>,
    output_step: f64,
) -> Result<ModeTrajectory> {
    let times = output_times(output_step, schedule.end())?;
    let held = mode_samples(gains, lambda, schedule, y0);
    let lb = gains.b() * lambda;
    let states = times
        .iter()
        .map(|&t| {
            let k = schedule.interval_of(t);
            let dt = t - schedule.instants()[k];
            if dt == 0.0 {
                held[k]
            } else {
                HeldFlow::new(gains, dt).transition(&lb) * held[k]
            }
        })
        .collect();
    Ok(ModeTrajectory {
        lambda,
        times,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{modal_decomposition, random_connected_graph};

    fn unit() -> ProtocolGains {
        ProtocolGains::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn consensus_initial_condition_stays_put() {
        let g = random_connected_graph(6, 0.4, 2).unwrap();
        let basis = modal_decomposition(&g).unwrap();
        let sched = SamplingSchedule::periodic(0.05, 5.0).unwrap();
        let init = NetworkState::consensus(6, 3.25);
        let modal = simulate_modal(&basis, &unit(), &sched, &init, 0.1).unwrap();
        let rk4 = simulate_rk4(&g, &unit(), &sched, &init, 1e-3, 0.1).unwrap();
        for s in modal.samples.iter().chain(&rk4.samples) {
            assert!(s.x.iter().all(|&x| (x - 3.25).abs() < 1e-12));
            assert!(s.v.amax() < 1e-12);
        }
    }

    #[test]
    fn first_sample_is_initial_state_exactly() {
        let g = random_connected_graph(5, 0.5, 3).unwrap();
        let basis = modal_decomposition(&g).unwrap();
        let sched = SamplingSchedule::periodic(0.05, 1.0).unwrap();
        let init = NetworkState::new(
            0.0,
            DVector::from_vec(vec![1.0, -2.0, 0.5, 0.1, 3.0]),
            DVector::from_vec(vec![0.0, 0.3, -0.2, 0.0, 1.0]),
        )
        .unwrap();
        let traj = simulate_modal(&basis, &unit(), &sched, &init, 0.25).unwrap();
        assert_eq!(traj.samples[0].x, init.x);
        assert_eq!(traj.samples[0].v, init.v);
        assert_eq!(traj.samples.len(), 5);
    }

    #[test]
    fn two_agents_reach_agreement() {
        let g = Graph::path(2).unwrap();
        let basis = modal_decomposition(&g).unwrap();
        let sched = SamplingSchedule::periodic(0.01, 60.0).unwrap();
        let init =
            NetworkState::new(0.0, DVector::from_vec(vec![1.0, -1.0]), DVector::zeros(2)).unwrap();
        let traj = simulate_modal(&basis, &unit(), &sched, &init, 0.01).unwrap();
        let spread: Vec<(f64, f64)> = traj
            .samples
            .iter()
            .map(|s| (s.t, (s.x[0] - s.x[1]).abs()))
            .collect();
        // envelope: maxima over consecutive 10 s windows strictly decrease
        let window_max: Vec<f64> = (0..6)
            .map(|w| {
                spread
                    .iter()
                    .filter(|(t, _)| *t >= 10.0 * w as f64 && *t < 10.0 * (w + 1) as f64)
                    .map(|(_, d)| *d)
                    .fold(0.0, f64::max)
            })
            .collect();
        for pair in window_max.windows(2) {
            assert!(pair[1] < pair[0], "{window_max:?}");
        }
        let last = traj.last().unwrap();
        assert!((last.t - 60.0).abs() < 1e-9);
        assert!((last.x[0] - last.x[1]).abs() < 1e-6);

        let rk4 = simulate_rk4(&g, &unit(), &sched, &init, 1e-3, 0.01).unwrap();
        assert_eq!(rk4.samples.len(), traj.samples.len());
        for (a, b) in traj.samples.iter().zip(&rk4.samples) {
            assert!((&a.x - &b.x).amax() < 1e-9);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let basis = modal_decomposition(&Graph::path(3).unwrap()).unwrap();
        let sched = SamplingSchedule::periodic(0.1, 1.0).unwrap();
        let init = NetworkState::consensus(4, 0.0);
        assert!(matches!(
            simulate_modal(&basis, &unit(), &sched, &init, 0.1),
            Err(Error::Dimension { .. })
        ));
        assert!(simulate_rk4(&Graph::path(3).unwrap(), &unit(), &sched, &init, 1e-3, 0.1).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let basis = modal_decomposition(&Graph::complete(3).unwrap()).unwrap();
        let sched = SamplingSchedule::periodic(0.1, 1.0).unwrap();
        let init = NetworkState::new(
            0.0,
            DVector::from_vec(vec![0.1, 0.2, 0.7]),
            DVector::from_vec(vec![1.0 / 3.0, 0.0, -0.5]),
        )
        .unwrap();
        let traj = simulate_modal(&basis, &unit(), &sched, &init, 0.1).unwrap();
        let csv = traj.to_csv();
        assert!(csv.starts_with("t,x1,x2,x3,v1,v2,v3\n"));
        let back = Trajectory::parse_csv(&csv, traj.meta.clone()).unwrap();
        assert_eq!(back, traj);
    }

    #[test]
    fn mode_trajectory_matches_samples_at_instants() {
        let sched = SamplingSchedule::periodic(0.5, 5.0).unwrap();
        let y0 = Vector2::new(1.0, -0.5);
        let traj = simulate_mode(&unit(), 0.3, &sched, y0, 0.5).unwrap();
        let held = mode_samples(&unit(), 0.3, &sched, y0);
        for (a, b) in traj.states.iter().zip(&held) {
            assert!((a - b).amax() < 1e-15);
        }
    }
}
