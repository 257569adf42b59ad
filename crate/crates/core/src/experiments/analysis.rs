use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ResultRow;

/// Arithmetic mean, summed left to right; NaN for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc + v) / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Percentile bootstrap interval for the mean of `values`.
pub fn bootstrap_mean_ci(values: &[f64], resamples: usize, level: f64, seed: u64) -> (f64, f64) {
    let n = values.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    let lo = ((resamples as f64 * alpha).floor() as usize).min(resamples - 1);
    let hi = ((resamples as f64 * (1.0 - alpha)).ceil() as usize).saturating_sub(1).min(resamples - 1);
    (means[lo], means[hi])
}

/// Values of trial-level `metric` rows matching the filters.
pub fn metric_values(rows: &[ResultRow], strategy: &str, hops: usize, cost_std: f64, metric: &str) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.strategy == strategy && r.hops == hops && r.cost_std == cost_std && r.metric == metric)
        .filter(|r| r.trial.is_some())
        .map(|r| r.value)
        .collect()
}

/// Per strategy, the mean of trial-level `metric` for each instance of a cell, indexed by instance.
pub fn instance_means(rows: &[ResultRow], hops: usize, cost_std: f64, metric: &str) -> BTreeMap<String, Vec<f64>> {
    let mut grouped: BTreeMap<String, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for r in rows {
        if r.hops == hops && r.cost_std == cost_std && r.metric == metric && r.trial.is_some() {
            if let Some(i) = r.instance {
                grouped
                    .entry(r.strategy.clone())
                    .or_default()
                    .entry(i)
                    .or_default()
                    .push(r.value);
            }
        }
    }
    grouped
        .into_iter()
        .map(|(s, by_instance)| (s, by_instance.values().map(|v| mean(v)).collect()))
        .collect()
}
