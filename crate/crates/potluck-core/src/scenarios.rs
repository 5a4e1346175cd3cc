//! Canned experiment presets: the binary bar-game oscillation and the
//! 100-agent rational-vs-weighted-majority benchmark.

use serde::{Deserialize, Serialize};

use crate::demand::DemandProcess;
use crate::engine::run_simulation;
use crate::error::SimError;
use crate::learning::SupplyRule;
use crate::metrics::run_stats;
use crate::model::{AgentSetup, LearnerKind, ScenarioConfig, SimulationResult};
use crate::predictors::stock_predictor_pool;

/// Whether a supply trace settles into a repeating cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OscillationVerdict {
    /// True when a repeating cycle of length >= 2 was found.
    pub detected: bool,
    /// Smallest period of the post-transient trace; `Some(1)` means the
    /// trace is constant, `None` that it is aperiodic.
    pub period: Option<usize>,
    /// Rounds skipped before scanning.
    pub transient_length: usize,
}

/// Find the smallest period `p <= len/2` such that the post-transient trace
/// repeats exactly every `p` entries. A constant trace reports `period =
/// Some(1)` with `detected = false`.
pub fn detect_oscillation(
    trace: &[f64],
    transient: usize,
) -> Result<OscillationVerdict, SimError> {
    if trace.len() <= transient + 4 {
        return Err(SimError::structural(format!(
            "trace of {} rounds is too short for transient {transient}",
            trace.len()
        )));
    }
    let window = &trace[transient..];
    for period in 1..=window.len() / 2 {
        if (period..window.len()).all(|i| window[i] == window[i - period]) {
            return Ok(OscillationVerdict {
                detected: period >= 2,
                period: Some(period),
                transient_length: transient,
            });
        }
    }
    Ok(OscillationVerdict {
        detected: false,
        period: None,
        transient_length: transient,
    })
}

/// Config for the binary fixed-demand reduction: `n_agents` rational agents
/// with strategy set {0, 1} face a fixed aggregate demand `0 < d < n`.
pub fn sfbp_config(
    n_agents: usize,
    fixed_demand: f64,
    n_rounds: usize,
    seed: u64,
) -> Result<ScenarioConfig, SimError> {
    if !(fixed_demand > 0.0 && fixed_demand < n_agents as f64) {
        return Err(SimError::config(
            "fixed_demand",
            format!("must satisfy 0 < d < n_agents, got d = {fixed_demand}, n = {n_agents}"),
        ));
    }
    Ok(ScenarioConfig {
        n_agents,
        n_rounds,
        seed,
        supply_rule: SupplyRule::LastGapThreshold,
        agents: AgentSetup::Generate {
            learner: LearnerKind::Rational,
            capacity_range: (1.0, 1.0),
            predictor_pool_size: None,
        },
        demand_process: DemandProcess::FixedTotal {
            total: fixed_demand,
        },
        ..ScenarioConfig::default()
    })
}

/// Run the binary fixed-demand scenario. All supplies start at 0, then every
/// agent reacts to the previous round's parity, producing the 0 <-> n
/// oscillation: equilibrium is never reached.
pub fn scenario_sfbp_binary(
    n_agents: usize,
    fixed_demand: f64,
    n_rounds: usize,
    seed: u64,
) -> Result<SimulationResult, SimError> {
    run_simulation(&sfbp_config(n_agents, fixed_demand, n_rounds, seed)?)
}

/// The benchmark config: 100 agents, integer capacities uniform in
/// [500, 1000], per-agent demand uniform in [0, 1000], 1000 rounds, the full
/// five-predictor pool with k = 5.
pub fn paper_config(seed: u64, learner: LearnerKind) -> ScenarioConfig {
    ScenarioConfig {
        n_agents: 100,
        n_rounds: 1000,
        seed,
        agents: AgentSetup::Generate {
            learner,
            capacity_range: (500.0, 1000.0),
            predictor_pool_size: match learner {
                LearnerKind::WeightedMajority => Some(5),
                LearnerKind::Rational => None,
            },
        },
        demand_process: DemandProcess::UniformPerAgent {
            lo: 0.0,
            hi: 1000.0,
            integer: false,
        },
        predictor_pool: stock_predictor_pool(10, 50_000.0),
        ..ScenarioConfig::default()
    }
}

/// A rational run and a weighted-majority run over the identical demand
/// realization, ready for paired comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedRuns {
    pub rational: SimulationResult,
    pub weighted_majority: SimulationResult,
    pub rational_config: ScenarioConfig,
    pub weighted_config: ScenarioConfig,
}

/// Run both learners against the same demand stream. The demand stream is
/// derived from the seed alone, so identical seeds give element-wise
/// identical demand matrices across the two runs.
pub fn paired_runs(
    rational_config: ScenarioConfig,
    weighted_config: ScenarioConfig,
) -> Result<PairedRuns, SimError> {
    Ok(PairedRuns {
        rational: run_simulation(&rational_config)?,
        weighted_majority: run_simulation(&weighted_config)?,
        rational_config,
        weighted_config,
    })
}

/// Force every agent in the config to the given learner.
pub fn with_learner(config: &ScenarioConfig, learner: LearnerKind) -> ScenarioConfig {
    let mut out = config.clone();
    let default_k = match learner {
        LearnerKind::WeightedMajority => Some(config.predictor_pool.len()),
        LearnerKind::Rational => None,
    };
    out.agents = match &config.agents {
        AgentSetup::Generate { capacity_range, predictor_pool_size, .. } => AgentSetup::Generate {
            learner,
            capacity_range: *capacity_range,
            predictor_pool_size: match learner {
                LearnerKind::WeightedMajority => predictor_pool_size.or(default_k),
                LearnerKind::Rational => *predictor_pool_size,
            },
        },
        AgentSetup::Explicit(specs) => AgentSetup::Explicit(
            specs
                .iter()
                .map(|spec| {
                    let mut spec = spec.clone();
                    spec.learner = learner;
                    if learner == LearnerKind::WeightedMajority
                        && spec.predictor_pool_size.is_none()
                    {
                        spec.predictor_pool_size = default_k;
                    }
                    spec
                })
                .collect(),
        ),
    };
    out
}

/// The benchmark comparison: both learners on the identical demand stream.
pub fn scenario_paper_replication(seed: u64) -> Result<PairedRuns, SimError> {
    let base = paper_config(seed, LearnerKind::WeightedMajority);
    paired_runs(with_learner(&base, LearnerKind::Rational), base)
}

/// A named, checkable claim about a preset's output.
#[derive(Debug, Clone, PartialEq)]
pub enum ExpectedProperty {
    /// `detect_oscillation` after the transient must report this period.
    OscillationWithPeriod { transient: usize, period: usize },
    /// `|S_t - D_t| >= bound` for every round `t >= from_round`.
    MinAbsGapFromRound { from_round: usize, bound: f64 },
    /// Mean total demand over the run lies in `[lo, hi]`.
    MeanTotalDemandWithin { lo: f64, hi: f64 },
}

impl ExpectedProperty {
    pub fn check(&self, result: &SimulationResult) -> Result<(), String> {
        match *self {
            ExpectedProperty::OscillationWithPeriod { transient, period } => {
                let trace: Vec<f64> = result.rounds.iter().map(|r| r.total_supply).collect();
                let verdict = detect_oscillation(&trace, transient).map_err(|e| e.to_string())?;
                if verdict.detected && verdict.period == Some(period) {
                    Ok(())
                } else {
                    Err(format!("expected period {period}, got {verdict:?}"))
                }
            }
            ExpectedProperty::MinAbsGapFromRound { from_round, bound } => {
                for round in result.rounds.iter().skip(from_round) {
                    let gap = round.parity_gap().abs();
                    if gap < bound {
                        return Err(format!(
                            "round {}: |gap| = {gap} below bound {bound}",
                            round.t
                        ));
                    }
                }
                Ok(())
            }
            ExpectedProperty::MeanTotalDemandWithin { lo, hi } => {
                let stats = run_stats(result).map_err(|e| e.to_string())?;
                if (lo..=hi).contains(&stats.mean_total_demand) {
                    Ok(())
                } else {
                    Err(format!(
                        "mean total demand {} outside [{lo}, {hi}]",
                        stats.mean_total_demand
                    ))
                }
            }
        }
    }
}

/// A preset scenario bundled with the properties its run must satisfy.
#[derive(Debug, Clone)]
pub struct ScenarioPreset {
    pub name: &'static str,
    pub config: ScenarioConfig,
    pub expected_properties: Vec<ExpectedProperty>,
}

impl ScenarioPreset {
    pub fn check_all(&self, result: &SimulationResult) -> Result<(), String> {
        for property in &self.expected_properties {
            property
                .check(result)
                .map_err(|e| format!("{}: {e}", self.name))?;
        }
        Ok(())
    }
}

/// The binary oscillation preset with its expected trace properties.
pub fn sfbp_preset(
    n_agents: usize,
    fixed_demand: f64,
    n_rounds: usize,
    seed: u64,
) -> Result<ScenarioPreset, SimError> {
    let min_gap = fixed_demand.min(n_agents as f64 - fixed_demand);
    Ok(ScenarioPreset {
        name: "sfbp",
        config: sfbp_config(n_agents, fixed_demand, n_rounds, seed)?,
        expected_properties: vec![
            ExpectedProperty::OscillationWithPeriod {
                transient: 0,
                period: 2,
            },
            ExpectedProperty::MinAbsGapFromRound {
                from_round: 1,
                bound: min_gap,
            },
        ],
    })
}

/// The benchmark preset with its demand-scale sanity band.
pub fn paper_preset(seed: u64) -> ScenarioPreset {
    ScenarioPreset {
        name: "paper",
        config: paper_config(seed, LearnerKind::WeightedMajority),
        expected_properties: vec![ExpectedProperty::MeanTotalDemandWithin {
            lo: 45_000.0,
            hi: 55_000.0,
        }],
    }
}
