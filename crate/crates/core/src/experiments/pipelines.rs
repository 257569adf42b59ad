use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::analysis::{mean, median};
use super::{sample_node_costs, ExperimentError, ExperimentKind, ExperimentSpec, ResultRow, ResultSet};
use crate::model::PathSpec;
use crate::planners::{plan_optimal_with_bound, Algorithm, PlannerError, PlannerKind};
use crate::sim::{run_simulation, RetransmissionPolicy, SimConfig, SimError};

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ResultSet, ExperimentError> {
    match spec.kind {
        ExperimentKind::HopsSweep => run_hops_sweep(spec),
        ExperimentKind::StdSweep => run_std_sweep(spec),
        ExperimentKind::RetransCompare => run_retrans_compare(spec),
        ExperimentKind::PlannerBench => run_planner_bench(spec),
    }
}

/// Mean simulated time per strategy for each hop count.
pub fn run_hops_sweep(spec: &ExperimentSpec) -> Result<ResultSet, ExperimentError> {
    run_sweep(spec, ExperimentKind::HopsSweep)
}

/// Mean simulated time per strategy for each cost standard deviation.
pub fn run_std_sweep(spec: &ExperimentSpec) -> Result<ResultSet, ExperimentError> {
    run_sweep(spec, ExperimentKind::StdSweep)
}

struct Instance {
    costs: Vec<f64>,
    trial_seeds: Vec<u64>,
}

/// Instances of one (hops, std) cell. Every strategy and policy sees the
/// same costs and the same per-trial seeds.
fn sample_cell(spec: &ExperimentSpec, hops: usize, std_index: usize) -> Result<Vec<Instance>, ExperimentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(((hops as u64) << 32) | std_index as u64);
    let std = spec.cost_std[std_index];
    (0..spec.instances)
        .map(|_| {
            let costs = sample_node_costs(hops - 1, spec.cost_mean, std, &mut rng)?;
            let trial_seeds = (0..spec.trials_per_instance).map(|_| rng.random()).collect();
            Ok(Instance { costs, trial_seeds })
        })
        .collect()
}

struct CellOutput {
    rows: Vec<ResultRow>,
    skipped: Vec<String>,
    timeouts: usize,
}

/// Plan and simulate every instance of a cell, rows in (instance, strategy, policy, trial) order.
fn simulate_cell(
    spec: &ExperimentSpec,
    kind: ExperimentKind,
    hops: usize,
    std: f64,
    instances: &[Instance],
    policies: &[RetransmissionPolicy],
) -> Result<CellOutput, ExperimentError> {
    let label = |strategy: PlannerKind, policy: RetransmissionPolicy| match kind {
        ExperimentKind::RetransCompare => policy.name().to_string(),
        _ => strategy.name().to_string(),
    };
    let with_oracle_cost = kind == ExperimentKind::StdSweep
        && hops - 1 <= spec.oracle_bound
        && !spec.strategies.contains(&PlannerKind::OPTIMAL);
    let per_instance: Vec<Result<CellOutput, ExperimentError>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let row = |strategy: String, trial: Option<usize>, metric: &str, value: f64| ResultRow {
                experiment: kind.name().to_string(),
                strategy,
                hops,
                cost_std: std,
                instance: Some(i),
                trial,
                metric: metric.to_string(),
                value,
                seed: spec.seed,
            };
            let path = PathSpec::from_costs(&inst.costs)?;
            let mut out = CellOutput {
                rows: Vec::new(),
                skipped: Vec::new(),
                timeouts: 0,
            };
            if with_oracle_cost {
                let report = plan_optimal_with_bound(&path, spec.oracle_bound).map_err(planner_error)?;
                out.rows.push(row("optimal".into(), None, "plan_cost", report.cost.total));
            }
            for &strategy in &spec.strategies {
                let report = match plan_with_bound(strategy, &path, spec.oracle_bound) {
                    Ok(r) => r,
                    Err(PlannerError::BoundExceeded { repeaters, bound }) => {
                        out.skipped.push(format!(
                            "{strategy} at hops {hops} instance {i}: {repeaters} repeaters exceeds the oracle bound {bound}"
                        ));
                        continue;
                    }
                    Err(e) => return Err(planner_error(e)),
                };
                for &policy in policies {
                    let name = label(strategy, policy);
                    if kind != ExperimentKind::RetransCompare || policy == policies[0] {
                        out.rows.push(row(strategy.name().into(), None, "plan_cost", report.cost.total));
                    }
                    for (t, &seed) in inst.trial_seeds.iter().enumerate() {
                        let config = SimConfig {
                            seed,
                            policy,
                            ..spec.sim.clone()
                        };
                        let metrics = match run_simulation(&report.plan, &config) {
                            Ok(m) => m,
                            Err(SimError::TimedOut(m)) => {
                                out.timeouts += 1;
                                out.rows.push(row(name.clone(), Some(t), "timed_out", 1.0));
                                *m
                            }
                            Err(e) => return Err(e.into()),
                        };
                        out.rows.push(row(name.clone(), Some(t), "completion_time", metrics.completion_time));
                        out.rows.push(row(name.clone(), Some(t), "pairs_prepared", metrics.pairs_prepared as f64));
                        out.rows.push(row(name.clone(), Some(t), "retransmissions", metrics.retransmissions as f64));
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut merged = CellOutput {
        rows: Vec::new(),
        skipped: Vec::new(),
        timeouts: 0,
    };
    for part in per_instance {
        let part = part?;
        merged.rows.extend(part.rows);
        merged.skipped.extend(part.skipped);
        merged.timeouts += part.timeouts;
    }
    Ok(merged)
}

fn plan_with_bound(
    strategy: PlannerKind,
    path: &PathSpec,
    bound: usize,
) -> Result<crate::planners::PlannerReport, PlannerError> {
    if strategy.algorithm() == Algorithm::Optimal {
        plan_optimal_with_bound(path, bound)
    } else {
        strategy.plan(path)
    }
}

fn planner_error(e: PlannerError) -> ExperimentError {
    match e {
        PlannerError::Model(m) => ExperimentError::Model(m),
        other => ExperimentError::Spec(other.to_string()),
    }
}

/// Per-strategy means of trial metrics within one cell, in first-seen order.
fn cell_means(rows: &[ResultRow], metric: &str) -> Vec<(String, f64)> {
    let mut order: Vec<String> = Vec::new();
    let mut values: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.metric == metric) {
        if !values.contains_key(&r.strategy) {
            order.push(r.strategy.clone());
        }
        values.entry(r.strategy.clone()).or_default().push(r.value);
    }
    order
        .into_iter()
        .map(|s| {
            let m = mean(&values[&s]);
            (s, m)
        })
        .collect()
}

fn aggregate(kind: ExperimentKind, spec: &ExperimentSpec, hops: usize, std: f64, rows: &[ResultRow]) -> Vec<ResultRow> {
    let agg = |strategy: String, instance: Option<usize>, metric: String, value: f64| ResultRow {
        experiment: kind.name().to_string(),
        strategy,
        hops,
        cost_std: std,
        instance,
        trial: None,
        metric,
        value,
        seed: spec.seed,
    };
    let mut out = Vec::new();
    for metric in ["completion_time", "pairs_prepared", "retransmissions", "plan_cost"] {
        for (strategy, m) in cell_means(rows, metric) {
            out.push(agg(strategy, None, format!("mean_{metric}"), m));
        }
    }
    match kind {
        ExperimentKind::RetransCompare => {
            let instances = spec.instances;
            for g in 0..spec.groups.min(instances) {
                let in_group: Vec<ResultRow> = rows
                    .iter()
                    .filter(|r| r.instance.is_some_and(|i| i * spec.groups / instances == g))
                    .cloned()
                    .collect();
                for metric in ["completion_time", "pairs_prepared"] {
                    for (strategy, m) in cell_means(&in_group, metric) {
                        out.push(agg(strategy, Some(g), format!("group_mean_{metric}"), m));
                    }
                }
            }
            for metric in ["completion_time", "pairs_prepared"] {
                let means: BTreeMap<String, f64> = cell_means(rows, metric).into_iter().collect();
                if let (Some(od), Some(fp)) = (means.get("on-demand"), means.get("full-path")) {
                    out.push(agg(
                        "on-demand-vs-full-path".into(),
                        None,
                        format!("reduction_{metric}"),
                        1.0 - od / fp,
                    ));
                }
            }
        }
        _ => {
            let means: BTreeMap<String, f64> = cell_means(rows, "completion_time").into_iter().collect();
            for (ibt, pses, label) in [
                ("ibt-layer-greedy", "pses-layer-greedy", "ibt-minus-pses-layer-greedy"),
                ("ibt-segment-greedy", "pses-segment-greedy", "ibt-minus-pses-segment-greedy"),
            ] {
                if let (Some(a), Some(b)) = (means.get(ibt), means.get(pses)) {
                    out.push(agg(label.into(), None, "diff_mean_completion_time".into(), a - b));
                }
            }
        }
    }
    out
}

fn run_sweep(spec: &ExperimentSpec, kind: ExperimentKind) -> Result<ResultSet, ExperimentError> {
    spec.validate()?;
    let mut set = ResultSet::default();
    for &hops in &spec.hops {
        for (si, &std) in spec.cost_std.iter().enumerate() {
            let instances = sample_cell(spec, hops, si)?;
            let cell = simulate_cell(spec, kind, hops, std, &instances, &[spec.sim.policy])?;
            let aggregates = aggregate(kind, spec, hops, std, &cell.rows);
            set.rows.extend(cell.rows);
            set.rows.extend(aggregates);
            set.skipped.extend(cell.skipped);
            set.timeouts += cell.timeouts;
        }
    }
    Ok(set)
}

/// Both retransmission policies on matched instances and seeds.
pub fn run_retrans_compare(spec: &ExperimentSpec) -> Result<ResultSet, ExperimentError> {
    spec.validate()?;
    let kind = ExperimentKind::RetransCompare;
    let mut set = ResultSet::default();
    for &hops in &spec.hops {
        for (si, &std) in spec.cost_std.iter().enumerate() {
            let instances = sample_cell(spec, hops, si)?;
            let cell = simulate_cell(spec, kind, hops, std, &instances, &RetransmissionPolicy::ALL)?;
            let aggregates = aggregate(kind, spec, hops, std, &cell.rows);
            set.rows.extend(cell.rows);
            set.rows.extend(aggregates);
            set.skipped.extend(cell.skipped);
            set.timeouts += cell.timeouts;
        }
    }
    Ok(set)
}

/// Planning wall time per strategy: warm-up runs, then the median of timed runs.
/// Runs single-threaded so timings do not contend.
pub fn run_planner_bench(spec: &ExperimentSpec) -> Result<ResultSet, ExperimentError> {
    spec.validate()?;
    let kind = ExperimentKind::PlannerBench;
    let mut set = ResultSet::default();
    for &hops in &spec.hops {
        for (si, &std) in spec.cost_std.iter().enumerate() {
            let instances = sample_cell(spec, hops, si)?;
            let mut per_strategy: Vec<(String, Vec<f64>)> = Vec::new();
            for &strategy in &spec.strategies {
                if strategy.algorithm() == Algorithm::Optimal && hops - 1 > spec.oracle_bound {
                    set.skipped.push(format!(
                        "{strategy} at hops {hops}: {} repeaters exceeds the oracle bound {}",
                        hops - 1,
                        spec.oracle_bound
                    ));
                    continue;
                }
                let mut medians = Vec::with_capacity(instances.len());
                for (i, inst) in instances.iter().enumerate() {
                    let path = PathSpec::from_costs(&inst.costs)?;
                    let mut expansions = 0;
                    for _ in 0..spec.bench_warmup {
                        plan_with_bound(strategy, &path, spec.oracle_bound).map_err(planner_error)?;
                    }
                    let mut times = Vec::with_capacity(spec.bench_repeats);
                    for _ in 0..spec.bench_repeats {
                        let started = Instant::now();
                        let report = plan_with_bound(strategy, &path, spec.oracle_bound).map_err(planner_error)?;
                        times.push(started.elapsed().as_secs_f64() * 1e6);
                        expansions = report.expansions;
                    }
                    let m = median(&times);
                    medians.push(m);
                    let row = |metric: &str, value: f64| ResultRow {
                        experiment: kind.name().to_string(),
                        strategy: strategy.name().to_string(),
                        hops,
                        cost_std: std,
                        instance: Some(i),
                        trial: None,
                        metric: metric.to_string(),
                        value,
                        seed: spec.seed,
                    };
                    set.rows.push(row("wall_time_us", m));
                    set.rows.push(row("expansions", expansions as f64));
                }
                per_strategy.push((strategy.name().to_string(), medians));
            }
            for (strategy, medians) in per_strategy {
                for (metric, value) in [("median_wall_time_us", median(&medians)), ("mean_wall_time_us", mean(&medians))] {
                    set.rows.push(ResultRow {
                        experiment: kind.name().to_string(),
                        strategy: strategy.clone(),
                        hops,
                        cost_std: std,
                        instance: None,
                        trial: None,
                        metric: metric.to_string(),
                        value,
                        seed: spec.seed,
                    });
                }
            }
        }
    }
    Ok(set)
}
