use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::AttemptModel;
use crate::ModelError;

/// Attempts needed for one successful swap at a node of cost `nc`.
///
/// Stochastic draws are geometric on `{1, 2, ...}` with success probability
/// `1 / nc`; the deterministic model returns `nc` itself as a duration multiplier.
pub fn sample_attempts<R: Rng + ?Sized>(nc: f64, model: AttemptModel, rng: &mut R) -> Result<f64, ModelError> {
    if !(nc.is_finite() && nc >= 1.0) {
        return Err(ModelError::Domain {
            field: "nc",
            value: nc,
            expected: "a finite cost >= 1",
        });
    }
    match model {
        AttemptModel::Deterministic => Ok(nc),
        AttemptModel::Stochastic => {
            let geometric = Geometric::new(1.0 / nc).expect("1 / nc lies in (0, 1]");
            Ok((geometric.sample(rng) + 1) as f64)
        }
    }
}
