//! Interference parameters of a repeater and the node cost derived from them.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Channel attenuation at which a 100 km channel stops delivering entanglement, in dB/km.
pub const MAX_CHANNEL_NOISE: f64 = 0.2;

/// Noise parameters of one repeater.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferenceProfile {
    /// Depolarizing rate of the quantum memory, in `[0, 1)`.
    pub dpzr: f64,
    /// Dephasing rate of the swap operation, in `[0, 1)`.
    pub dpsr: f64,
    /// Q-channel loss init rate, in `[0, 1]`.
    pub qlir: f64,
    /// Q-channel loss noise in dB/km over a 100 km channel, in `[0, 0.2]`.
    pub qln: f64,
}

impl InterferenceProfile {
    pub const NOISELESS: InterferenceProfile = InterferenceProfile {
        dpzr: 0.0,
        dpsr: 0.0,
        qlir: 0.0,
        qln: 0.0,
    };

    pub fn new(dpzr: f64, dpsr: f64, qlir: f64, qln: f64) -> Result<Self, ModelError> {
        check_rate("dpzr", dpzr, false)?;
        check_rate("dpsr", dpsr, false)?;
        check_channel(qlir, qln)?;
        Ok(Self {
            dpzr,
            dpsr,
            qlir,
            qln,
        })
    }

    pub fn channel_quality(&self) -> Result<f64, ModelError> {
        channel_quality(self.qlir, self.qln)
    }

    pub fn node_cost(&self) -> Result<f64, ModelError> {
        node_cost(self)
    }

    /// A profile whose node cost equals `cost`, with all interference placed on
    /// the depolarizing rate. Used for display when costs are sampled directly.
    pub fn canonical_for_cost(cost: f64) -> Result<Self, ModelError> {
        if !(cost >= 1.0) || !cost.is_finite() {
            return Err(ModelError::Domain {
                field: "cost",
                value: cost,
                expected: "finite and >= 1",
            });
        }
        Self::new(1.0 - 1.0 / cost, 0.0, 0.0, 0.0)
    }
}

fn check_rate(field: &'static str, value: f64, inclusive_one: bool) -> Result<(), ModelError> {
    let ok = if inclusive_one {
        (0.0..=1.0).contains(&value)
    } else {
        (0.0..1.0).contains(&value)
    };
    if ok {
        Ok(())
    } else {
        Err(ModelError::Domain {
            field,
            value,
            expected: if inclusive_one { "[0, 1]" } else { "[0, 1)" },
        })
    }
}

fn check_channel(qlir: f64, qln: f64) -> Result<(), ModelError> {
    check_rate("qlir", qlir, true)?;
    if !(0.0..=MAX_CHANNEL_NOISE).contains(&qln) {
        return Err(ModelError::Domain {
            field: "qln",
            value: qln,
            expected: "[0, 0.2] dB/km",
        });
    }
    Ok(())
}

/// Probability that entanglement distribution over a 100 km channel succeeds.
pub fn channel_quality(qlir: f64, qln: f64) -> Result<f64, ModelError> {
    check_channel(qlir, qln)?;
    Ok(1.0 - (qlir + qln / MAX_CHANNEL_NOISE) / 2.0)
}

/// Expected number of swap attempts a repeater with this profile needs for one success.
///
/// A rate of exactly 1 or a channel quality of 0 makes the success probability
/// zero and is reported as [`ModelError::Unreachable`] rather than a domain error.
pub fn node_cost(profile: &InterferenceProfile) -> Result<f64, ModelError> {
    check_rate("dpzr", profile.dpzr, true)?;
    check_rate("dpsr", profile.dpsr, true)?;
    let cq = channel_quality(profile.qlir, profile.qln)?;
    let success = (1.0 - profile.dpzr) * (1.0 - profile.dpsr) * cq;
    if success <= 0.0 {
        return Err(ModelError::Unreachable {
            reason: format!(
                "success probability is zero (dpzr={}, dpsr={}, channel quality={cq})",
                profile.dpzr, profile.dpsr
            ),
        });
    }
    Ok(1.0 / success)
}
