use pses::model::{plan_cost, LayerSolution, PathSpec, Segment, SwapPlan};
use pses::planners::PlannerKind;
use pses::sim::{
    check_protocol, run_simulation, run_simulation_traced, sample_attempts, AttemptModel, MessageKind,
    RetransmissionPolicy, SimConfig, SimError, TraceKind,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn worked_path() -> PathSpec {
    PathSpec::from_costs(&[50.0, 30.0, 45.0, 100.0]).unwrap()
}

fn stochastic(seed: u64, policy: RetransmissionPolicy) -> SimConfig {
    SimConfig {
        seed,
        policy,
        ..SimConfig::default()
    }
}

fn composite_plan(costs: &[f64]) -> SwapPlan {
    // {x1,x2} and {x4} in layer 1, then {x3}
    let path = PathSpec::from_costs(costs).unwrap();
    let seg = |h: &str, p: &[&str], t: &str| Segment::new(h, p.iter().map(|s| s.to_string()).collect(), t);
    SwapPlan::new(
        path,
        vec![
            LayerSolution::new(vec![seg("x0", &["x1", "x2"], "x3"), seg("x3", &["x4"], "x5")]),
            LayerSolution::new(vec![seg("x0", &["x3"], "x5")]),
        ],
    )
    .unwrap()
}

#[test]
fn deterministic_run_of_composite_plan_takes_145() {
    let plan = PlannerKind::PSES_LAYER_GREEDY.plan(&worked_path()).unwrap().plan;
    let m = run_simulation(&plan, &SimConfig::cost_equivalent()).unwrap();
    assert_eq!(m.completion_time, 145.0);
    assert_eq!(m.per_layer_times, vec![100.0, 45.0]);
    assert_eq!((m.failures, m.pairs_prepared), (0, 5));
}

#[test]
fn deterministic_time_scales_with_attempt_latency() {
    let plan = PlannerKind::BBT.plan(&worked_path()).unwrap().plan;
    let config = SimConfig {
        attempt_latency: 2.0,
        ..SimConfig::cost_equivalent()
    };
    assert_eq!(run_simulation(&plan, &config).unwrap().completion_time, 390.0);
}

#[test]
fn latencies_add_up_in_deterministic_mode() {
    // one repeater of cost 3: prep 1, START_ES 0.5, swap 3, ACK_DONE 0.5
    let plan = PlannerKind::SEQUENTIAL.plan(&PathSpec::from_costs(&[3.0]).unwrap()).unwrap().plan;
    let config = SimConfig {
        classical_latency: 0.5,
        prep_latency: 1.0,
        attempt_model: AttemptModel::Deterministic,
        ..SimConfig::default()
    };
    assert_eq!(run_simulation(&plan, &config).unwrap().completion_time, 5.0);
}

#[test]
fn two_users_complete_after_preparation() {
    let plan = SwapPlan::new(PathSpec::from_costs(&[]).unwrap(), vec![]).unwrap();
    let m = run_simulation(&plan, &SimConfig::default()).unwrap();
    assert_eq!((m.completion_time, m.pairs_prepared, m.attempts), (1.0, 1, 0));
}

#[test]
fn perfect_nodes_never_fail() {
    let path = PathSpec::from_costs(&[1.0; 6]).unwrap();
    for kind in PlannerKind::ALL {
        let plan = kind.plan(&path).unwrap().plan;
        for policy in RetransmissionPolicy::ALL {
            let m = run_simulation(&plan, &stochastic(11, policy)).unwrap();
            assert_eq!(m.failures, 0);
            assert_eq!(m.retransmissions, 0);
            assert_eq!(m.pairs_prepared, 7);
            assert_eq!(m.attempts, 6);
        }
    }
}

#[test]
fn metrics_record_generator_and_seed() {
    let plan = composite_plan(&[1.5; 4]);
    let m = run_simulation(&plan, &stochastic(99, RetransmissionPolicy::OnDemand)).unwrap();
    assert_eq!((m.rng.as_str(), m.seed), ("ChaCha8Rng", 99));
}

#[test]
fn cutoff_returns_partial_metrics() {
    let plan = composite_plan(&[50.0; 4]);
    let config = SimConfig {
        max_sim_time: 10.0,
        ..stochastic(1, RetransmissionPolicy::FullPath)
    };
    match run_simulation(&plan, &config) {
        Err(SimError::TimedOut(m)) => {
            assert_eq!(m.completion_time, 10.0);
            assert!(m.attempts > 0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn single_parent_failure_costs_two_pairs() {
    let plan = PlannerKind::SEQUENTIAL.plan(&PathSpec::from_costs(&[2.0]).unwrap()).unwrap().plan;
    let mut seen_failure = false;
    for seed in 0..50 {
        let m = run_simulation(&plan, &stochastic(seed, RetransmissionPolicy::OnDemand)).unwrap();
        assert_eq!(m.pairs_prepared, 2 + 2 * m.failures);
        assert_eq!(m.retransmissions, m.failures);
        if m.failures == 1 {
            seen_failure = true;
            assert_eq!(m.pairs_prepared, 4);
        }
    }
    assert!(seen_failure);
}

#[test]
fn composite_failure_reprepares_segment_and_restarts_first_member() {
    // x2 is the only unreliable node, so every failure is x2's
    let plan = composite_plan(&[1.0, 4.0, 1.0, 1.0]);
    let mut checked = false;
    for seed in 0..40 {
        let (m, trace) = run_simulation_traced(&plan, &stochastic(seed, RetransmissionPolicy::OnDemand)).unwrap();
        assert_eq!(m.pairs_prepared, 5 + 3 * m.failures);
        if m.failures == 0 {
            continue;
        }
        checked = true;
        let failed = trace
            .iter()
            .position(|e| e.kind == TraceKind::Message(MessageKind::Failed))
            .unwrap();
        let next_begin = trace[failed..]
            .iter()
            .find(|e| e.kind == TraceKind::AttemptBegin)
            .unwrap();
        assert_eq!(next_begin.node.as_deref(), Some("x1"));
        let ready = trace[failed..]
            .iter()
            .find(|e| e.kind == TraceKind::Message(MessageKind::EntReady))
            .unwrap();
        assert_eq!(ready.dst.to_string(), "x1");
        assert_eq!(ready.src.to_string(), "ldc0");
    }
    assert!(checked);
}

#[test]
fn full_path_failure_reprepares_every_link_and_restarts() {
    let plan = composite_plan(&[1.0, 1.0, 3.0, 1.0]);
    let mut checked = false;
    for seed in 0..40 {
        let (m, trace) = run_simulation_traced(&plan, &stochastic(seed, RetransmissionPolicy::FullPath)).unwrap();
        assert_eq!(m.pairs_prepared, 5 * (1 + m.failures));
        assert_eq!(m.restarts, m.failures);
        assert_eq!(m.per_layer_times.len(), 2);
        if m.failures > 0 {
            checked = true;
            let restart = trace.iter().position(|e| e.kind == TraceKind::Restart).unwrap();
            let next_start = trace[restart..]
                .iter()
                .find(|e| e.kind == TraceKind::Message(MessageKind::StartEs))
                .unwrap();
            assert_eq!(next_start.layer, 1);
        }
    }
    assert!(checked);
}

#[test]
fn composite_members_start_only_after_predecessor_reports() {
    let plan = composite_plan(&[2.0; 4]);
    let (_, trace) = run_simulation_traced(&plan, &stochastic(5, RetransmissionPolicy::OnDemand)).unwrap();
    let x2_start = trace
        .iter()
        .position(|e| e.kind == TraceKind::Message(MessageKind::StartEs) && e.node.as_deref() == Some("x2"))
        .unwrap();
    let x1_done = trace
        .iter()
        .position(|e| e.kind == TraceKind::Message(MessageKind::AckDone) && e.node.as_deref() == Some("x1"))
        .unwrap();
    assert!(x1_done < x2_start);
    let first_round = trace
        .iter()
        .filter(|e| e.kind == TraceKind::Message(MessageKind::StartEs) && e.layer == 1 && e.time == 1.0)
        .count();
    assert_eq!(first_round, 2);
}

#[test]
fn no_failure_run_has_one_dispatch_round_per_layer() {
    let plan = composite_plan(&[1.0; 4]);
    let (_, trace) = run_simulation_traced(&plan, &stochastic(0, RetransmissionPolicy::OnDemand)).unwrap();
    let starts: Vec<usize> = trace
        .iter()
        .filter(|e| e.kind == TraceKind::Message(MessageKind::StartEs))
        .map(|e| e.layer)
        .collect();
    // layer 1: x1, x4, then x2 inside the composite; layer 2: x3
    assert_eq!(starts, [1, 1, 1, 2]);
    assert_eq!(trace.last().unwrap().kind, TraceKind::Complete);
}

#[test]
fn traces_obey_barrier_and_sequentiality() {
    let path = PathSpec::from_costs(&[1.8, 1.2, 2.5, 1.4, 1.1, 3.0, 1.6]).unwrap();
    for kind in PlannerKind::ALL {
        let plan = kind.plan(&path).unwrap().plan;
        for policy in RetransmissionPolicy::ALL {
            for seed in 0..10 {
                let config = SimConfig {
                    classical_latency: 0.25,
                    ..stochastic(seed, policy)
                };
                let (_, trace) = run_simulation_traced(&plan, &config).unwrap();
                let report = check_protocol(&plan, &trace);
                assert!(report.is_clean(), "{kind} {policy} seed {seed}: {report:?}");
                assert!(report.attempts_checked > 0);
            }
        }
    }
}

#[test]
fn protocol_checker_flags_a_broken_trace() {
    let plan = composite_plan(&[1.0; 4]);
    let (_, mut trace) = run_simulation_traced(&plan, &stochastic(0, RetransmissionPolicy::OnDemand)).unwrap();
    // move x3's attempt (layer 2) to the front
    let i = trace
        .iter()
        .position(|e| e.kind == TraceKind::AttemptBegin && e.layer == 2)
        .unwrap();
    let e = trace.remove(i);
    trace.insert(0, e);
    assert_eq!(check_protocol(&plan, &trace).barrier_violations, 1);
}

#[test]
fn trace_lines_have_seven_fields() {
    let plan = composite_plan(&[1.5; 4]);
    let (_, trace) = run_simulation_traced(&plan, &stochastic(2, RetransmissionPolicy::OnDemand)).unwrap();
    for e in &trace {
        assert_eq!(e.to_string().split(',').count(), 7, "{e}");
    }
}

/// A layer of single-parent segments with zero delays besides attempts
/// lasts the maximum of independent geometric draws.
#[test]
fn single_parent_layer_matches_max_of_geometrics() {
    let costs = [1.4, 2.0, 1.2];
    let path = PathSpec::from_costs(&[costs[0], 1.0, costs[1], 1.0, costs[2]]).unwrap();
    let plan = SwapPlan::new(
        path.clone(),
        vec![
            LayerSolution::new(vec![
                Segment::spanning(&path, 1, 1),
                Segment::spanning(&path, 3, 3),
                Segment::spanning(&path, 5, 5),
            ]),
            LayerSolution::new(vec![Segment::new("x0", vec!["x2".into()], "x4")]),
            LayerSolution::new(vec![Segment::new("x0", vec!["x4".into()], "x6")]),
        ],
    )
    .unwrap();
    let trials = 100_000u64;
    let config = |seed| SimConfig {
        prep_latency: 0.0,
        ..stochastic(seed, RetransmissionPolicy::OnDemand)
    };
    let simulated: f64 = (0..trials)
        .map(|seed| run_simulation(&plan, &config(seed)).unwrap().per_layer_times[0])
        .sum::<f64>()
        / trials as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(12345);
    let oracle: f64 = (0..trials)
        .map(|_| {
            costs
                .iter()
                .map(|&c| sample_attempts(c, AttemptModel::Stochastic, &mut rng).unwrap())
                .fold(0.0, f64::max)
        })
        .sum::<f64>()
        / trials as f64;
    assert!((simulated - oracle).abs() / oracle < 0.02, "{simulated} vs {oracle}");
}

fn grid_costs(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((256u32..1024).prop_map(|k| k as f64 / 256.0), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deterministic_completion_equals_plan_cost(costs in grid_costs(0..9), raw in prop::collection::vec(1.0..5.0f64, 0..9)) {
        for costs in [costs, raw] {
            let path = PathSpec::from_costs(&costs).unwrap();
            for kind in PlannerKind::ALL {
                let plan = kind.plan(&path).unwrap().plan;
                let m = run_simulation(&plan, &SimConfig::cost_equivalent()).unwrap();
                let cost = plan_cost(&plan).unwrap();
                prop_assert_eq!(m.completion_time, cost.total, "{}", kind);
                prop_assert_eq!(&m.per_layer_times, &cost.per_layer);
            }
        }
    }

    #[test]
    fn runs_are_reproducible(costs in grid_costs(1..8), seed in any::<u64>()) {
        let path = PathSpec::from_costs(&costs).unwrap();
        for kind in PlannerKind::COMPARED {
            let plan = kind.plan(&path).unwrap().plan;
            for policy in RetransmissionPolicy::ALL {
                let config = stochastic(seed, policy);
                let a = run_simulation_traced(&plan, &config).unwrap();
                let b = run_simulation_traced(&plan, &config).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn pair_accounting_is_conserved(costs in grid_costs(1..8), seed in any::<u64>()) {
        let path = PathSpec::from_costs(&costs).unwrap();
        for kind in PlannerKind::COMPARED {
            let plan = kind.plan(&path).unwrap().plan;
            let (m, trace) = run_simulation_traced(&plan, &stochastic(seed, RetransmissionPolicy::OnDemand)).unwrap();
            let implied: u64 = trace
                .iter()
                .filter(|e| e.kind == TraceKind::Message(MessageKind::Retry))
                .map(|e| plan.layers[e.layer - 1].segments[e.segment - 1].pair_count() as u64)
                .sum();
            prop_assert_eq!(m.pairs_prepared, path.hops() as u64 + implied);
            prop_assert!(m.pairs_prepared >= path.hops() as u64);
            let full = run_simulation(&plan, &stochastic(seed, RetransmissionPolicy::FullPath)).unwrap();
            prop_assert_eq!(full.pairs_prepared, path.hops() as u64 * (1 + full.restarts));
        }
    }

    #[test]
    fn on_demand_never_prepares_more_than_full_path(costs in grid_costs(1..10), seed in any::<u64>()) {
        let path = PathSpec::from_costs(&costs).unwrap();
        for kind in PlannerKind::COMPARED {
            let plan = kind.plan(&path).unwrap().plan;
            let od = run_simulation(&plan, &stochastic(seed, RetransmissionPolicy::OnDemand)).unwrap();
            let fp = run_simulation(&plan, &stochastic(seed, RetransmissionPolicy::FullPath)).unwrap();
            prop_assert!(od.pairs_prepared <= fp.pairs_prepared, "{}: {} > {}", kind, od.pairs_prepared, fp.pairs_prepared);
        }
    }
}
