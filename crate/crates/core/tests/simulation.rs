use consensus_lab::dynamics::{
    consensus_metrics, generate_schedule, sampled_states, simulate_modal, simulate_rk4, uem_limit,
    NetworkState, SamplingSchedule, Trajectory,
};
use consensus_lab::graph::{modal_decomposition, random_connected_graph};
use consensus_lab::scenario::random_initial_state;
use consensus_lab::{Graph, ProtocolGains};

#[test]
fn consensus_initial_condition_stays_put() {
    let g = Graph::eight_agent_reference();
    let basis = modal_decomposition(&g).unwrap();
    let gains = ProtocolGains::new(1.0, 1.0).unwrap();
    let schedule = generate_schedule(0.05, 1e-3, 20.0, 3).unwrap();
    let traj = simulate_modal(
        &basis,
        &gains,
        &schedule,
        &NetworkState::consensus(8, 4.25),
        0.5,
    )
    .unwrap();
    let m = consensus_metrics(&traj).unwrap();
    assert!(m.position_spread.iter().all(|&d| d < 1e-12));
    assert!(m.max_speed.iter().all(|&s| s < 1e-12));
    assert!((m.gamma_hat - 4.25).abs() < 1e-12);
}

#[test]
fn network_settles_at_the_unitary_mode_limit() {
    let g = random_connected_graph(7, 0.5, 21).unwrap();
    let basis = modal_decomposition(&g).unwrap();
    let gains = ProtocolGains::new(1.0, 1.0).unwrap();
    let schedule = generate_schedule(0.05, 1e-3, 1500.0, 21).unwrap();
    let x0 = random_initial_state(7, 21);
    let traj = simulate_modal(&basis, &gains, &schedule, &x0, 1.0).unwrap();
    let m = consensus_metrics(&traj).unwrap();
    let uem = uem_limit(&basis, &gains, &schedule, &x0, 1e-9).unwrap();
    assert!(m.final_position_spread() < 1e-9);
    assert!((m.gamma_hat - uem.gamma).abs() < 1e-8);
}

#[test]
fn held_values_match_the_continuous_trajectory_at_instants() {
    let g = Graph::path(5).unwrap();
    let basis = modal_decomposition(&g).unwrap();
    let gains = ProtocolGains::new(2.0, 0.5).unwrap();
    let schedule = SamplingSchedule::periodic(0.25, 5.0).unwrap();
    let x0 = random_initial_state(5, 2);
    let traj = simulate_modal(&basis, &gains, &schedule, &x0, 0.25).unwrap();
    let held = sampled_states(&basis, &gains, &schedule, &x0).unwrap();
    for (a, b) in traj.samples.iter().zip(&held) {
        assert!((a.t - b.t).abs() < 1e-12);
        assert!((&a.x - &b.x).amax() < 1e-12);
    }
}

#[test]
fn rk4_agrees_with_exact_flow() {
    let g = random_connected_graph(9, 0.3, 5).unwrap();
    let basis = modal_decomposition(&g).unwrap();
    let gains = ProtocolGains::new(1.0, 1.0).unwrap();
    let schedule = generate_schedule(0.1, 1e-3, 3.0, 5).unwrap();
    let x0 = random_initial_state(9, 5);
    let exact = simulate_modal(&basis, &gains, &schedule, &x0, 0.1).unwrap();
    let rk4 = simulate_rk4(&g, &gains, &schedule, &x0, 1e-3, 0.1).unwrap();
    assert_eq!(exact.samples.len(), rk4.samples.len());
    for (a, b) in exact.samples.iter().zip(&rk4.samples) {
        assert!((&a.x - &b.x).amax() < 1e-9);
        assert!((&a.v - &b.v).amax() < 1e-9);
    }
}

#[test]
fn csv_round_trips_are_lossless() {
    let g = Graph::eight_agent_reference();
    let basis = modal_decomposition(&g).unwrap();
    let gains = ProtocolGains::new(1.0, 1.0).unwrap();
    let schedule = generate_schedule(0.05, 1e-3, 3.0, 9).unwrap();
    let back = SamplingSchedule::parse_csv(&schedule.to_csv(), 0.05).unwrap();
    assert_eq!(back, schedule);

    let traj = simulate_modal(&basis, &gains, &schedule, &random_initial_state(8, 9), 0.1).unwrap();
    let parsed = Trajectory::parse_csv(&traj.to_csv(), traj.meta.clone()).unwrap();
    assert_eq!(parsed, traj);
}
