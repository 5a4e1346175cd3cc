//! Per-agent demand generation for each round.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// How per-agent demands `d_{i,t}` are drawn each round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum DemandProcess {
    /// Independent uniform draws in `[lo, hi]` for every agent; set
    /// `integer` to restrict draws to whole units.
    UniformPerAgent {
        lo: f64,
        hi: f64,
        #[serde(default)]
        integer: bool,
    },
    /// The same aggregate total every round, split equally across agents.
    FixedTotal { total: f64 },
    /// Sinusoidal aggregate total with uniform per-agent jitter.
    TimeVaryingTotal {
        base: f64,
        amplitude: f64,
        period: f64,
        jitter: (f64, f64),
    },
}

impl DemandProcess {
    pub(crate) fn validate(&self) -> Result<(), SimError> {
        match self {
            DemandProcess::UniformPerAgent { lo, hi, integer } => {
                if !(lo.is_finite() && hi.is_finite() && *lo >= 0.0 && lo <= hi) {
                    return Err(SimError::config(
                        "demand_process.uniform-per-agent",
                        "bounds must be finite with 0 <= lo <= hi",
                    ));
                }
                if *integer && lo.ceil() > hi.floor() {
                    return Err(SimError::config(
                        "demand_process.uniform-per-agent",
                        "integer draws need at least one whole unit in [lo, hi]",
                    ));
                }
            }
            DemandProcess::FixedTotal { total } => {
                if !(total.is_finite() && *total >= 0.0) {
                    return Err(SimError::config(
                        "demand_process.fixed-total",
                        "total must be finite and >= 0",
                    ));
                }
            }
            DemandProcess::TimeVaryingTotal {
                base,
                amplitude,
                period,
                jitter,
            } => {
                if !(base.is_finite() && *base >= 0.0) {
                    return Err(SimError::config(
                        "demand_process.time-varying-total",
                        "base must be finite and >= 0",
                    ));
                }
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(SimError::config(
                        "demand_process.time-varying-total",
                        "amplitude must be finite and >= 0",
                    ));
                }
                if !(period.is_finite() && *period > 0.0) {
                    return Err(SimError::config(
                        "demand_process.time-varying-total",
                        "period must be finite and > 0",
                    ));
                }
                if !(jitter.0.is_finite() && jitter.1.is_finite() && jitter.0 <= jitter.1) {
                    return Err(SimError::config(
                        "demand_process.time-varying-total",
                        "jitter bounds must be finite with lo <= hi",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Closed interval guaranteed to contain every per-agent draw.
    pub fn per_agent_bounds(&self, n_agents: usize) -> (f64, f64) {
        match self {
            DemandProcess::UniformPerAgent { lo, hi, .. } => (*lo, *hi),
            DemandProcess::FixedTotal { total } => {
                // The last agent absorbs the split's rounding residue, so pad
                // the nominal share by a hair more than that residue can be.
                let share = total / n_agents as f64;
                let pad = share * 1e-9 + f64::MIN_POSITIVE;
                ((share - pad).max(0.0), share + pad)
            }
            DemandProcess::TimeVaryingTotal {
                base,
                amplitude,
                jitter,
                ..
            } => {
                let hi = ((base + amplitude) / n_agents as f64 + jitter.1).max(0.0);
                (0.0, hi)
            }
        }
    }

    /// Draw round `t`'s per-agent demands.
    pub fn generate(&self, t: usize, n_agents: usize, rng: &mut impl Rng) -> Vec<f64> {
        match self {
            DemandProcess::UniformPerAgent { lo, hi, integer: false } => {
                gen_uniform_demand(n_agents, (*lo, *hi), rng)
            }
            DemandProcess::UniformPerAgent { lo, hi, integer: true } => {
                gen_uniform_integer_demand(n_agents, (*lo, *hi), rng)
            }
            DemandProcess::FixedTotal { total } => gen_fixed_demand(n_agents, *total),
            DemandProcess::TimeVaryingTotal {
                base,
                amplitude,
                period,
                jitter,
            } => gen_time_varying_demand(t, n_agents, *base, *amplitude, *period, *jitter, rng),
        }
    }
}

/// `n_agents` independent uniform draws in `[lo, hi]`.
pub fn gen_uniform_demand(n_agents: usize, range: (f64, f64), rng: &mut impl Rng) -> Vec<f64> {
    (0..n_agents)
        .map(|_| rng.random_range(range.0..=range.1))
        .collect()
}

/// `n_agents` independent integer-uniform draws in `[ceil(lo), floor(hi)]`.
pub fn gen_uniform_integer_demand(
    n_agents: usize,
    range: (f64, f64),
    rng: &mut impl Rng,
) -> Vec<f64> {
    let lo = range.0.ceil() as i64;
    let hi = range.1.floor() as i64;
    (0..n_agents)
        .map(|_| rng.random_range(lo..=hi) as f64)
        .collect()
}

/// Equal split of a fixed aggregate total. The last agent takes the split's
/// rounding residue so that the left-to-right sum reproduces `total` exactly.
pub fn gen_fixed_demand(n_agents: usize, total: f64) -> Vec<f64> {
    let share = total / n_agents as f64;
    let mut draws = vec![share; n_agents];
    let partial: f64 = draws[..n_agents - 1].iter().sum();
    draws[n_agents - 1] = (total - partial).max(0.0);
    draws
}

/// Sinusoidal aggregate total, clamped at zero, split equally with uniform
/// per-agent jitter; every per-agent value is clamped at zero.
#[allow(clippy::too_many_arguments)]
pub fn gen_time_varying_demand(
    t: usize,
    n_agents: usize,
    base: f64,
    amplitude: f64,
    period: f64,
    jitter: (f64, f64),
    rng: &mut impl Rng,
) -> Vec<f64> {
    let phase = std::f64::consts::TAU * t as f64 / period;
    let total = (base + amplitude * phase.sin()).max(0.0);
    let share = total / n_agents as f64;
    (0..n_agents)
        .map(|_| (share + rng.random_range(jitter.0..=jitter.1)).max(0.0))
        .collect()
}
