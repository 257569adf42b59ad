use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::ModelError;

/// Sampled costs are rounded to multiples of this step. Every layered sum of a
/// handful of such costs is then exact in `f64`, so plan costs compare exactly.
pub const COST_GRID: f64 = 1.0 / (1u64 << 24) as f64;

/// `n` independent node costs from a normal(mean, std) truncated below at 1 by
/// rejection. A zero `std` returns `mean` itself.
pub fn sample_node_costs<R: Rng + ?Sized>(n: usize, mean: f64, std: f64, rng: &mut R) -> Result<Vec<f64>, ModelError> {
    if !(mean.is_finite() && mean >= 1.0) {
        return Err(ModelError::Domain {
            field: "cost_mean",
            value: mean,
            expected: "a finite mean >= 1",
        });
    }
    if !(std.is_finite() && std >= 0.0) {
        return Err(ModelError::Domain {
            field: "cost_std",
            value: std,
            expected: "a finite standard deviation >= 0",
        });
    }
    if std == 0.0 {
        return Ok(vec![mean; n]);
    }
    let normal = Normal::new(mean, std).expect("std is finite and positive");
    Ok((0..n)
        .map(|_| loop {
            let x = normal.sample(rng);
            if x >= 1.0 {
                break (x / COST_GRID).round() * COST_GRID;
            }
        })
        .collect())
}
