//! Deterministic multi-agent simulator for the Potluck Problem: repeated
//! supply-against-demand coordination with no communication between agents.
//!
//! Every round, each agent predicts the coming aggregate demand from the
//! shared `(D, S)` history, supplies accordingly, and observes the realized
//! aggregates. Agents learn either by best reply (rational) or by a
//! weighted-majority ensemble of predictors whose weights undergo a
//! multiplicative `beta^upsilon` penalty each round.
//!
//! A master seed derives independent named RNG streams, so identical
//! configs reproduce identical runs bit for bit, and the two runs of a
//! paired comparison see the identical demand realization.

pub mod demand;
pub mod engine;
pub mod error;
pub mod learning;
pub mod metrics;
pub mod model;
pub mod predictors;
pub mod rng;
pub mod scenarios;

pub use demand::DemandProcess;
pub use engine::{build_agent_states, run_simulation, step_round, AgentState, StepParams};
pub use error::SimError;
pub use learning::{
    combine_weighted_majority, decide_supply, is_epsilon_predictive, weight_update_factor,
    EnsembleState, InitialWeights, SupplyRule,
};
pub use metrics::{compare_runs, run_stats, ComparisonReport, RunStats};
pub use model::{
    config_digest, AgentSetup, AgentSpec, History, LearnerKind, RoundRecord, ScenarioConfig,
    SimulationResult,
};
pub use predictors::{sample_predictor_set, stock_predictor_pool, PredictorKind};
pub use scenarios::{
    detect_oscillation, paired_runs, paper_config, paper_preset, scenario_paper_replication,
    scenario_sfbp_binary, sfbp_config, sfbp_preset, with_learner, OscillationVerdict, PairedRuns,
    ScenarioPreset,
};
