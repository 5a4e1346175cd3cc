//! The round-by-round simulation loop.
//!
//! Each round: (1) draw per-agent demands from the demand process, (2) every
//! agent forms its prediction from history alone (the oracle slot receives
//! the already-drawn total), (3) agents choose supplies, (4) aggregates are
//! computed, (5) weighted-majority agents update predictor weights against
//! the now-revealed total demand. Weight updates happen strictly after
//! aggregation, never before.

use rand_chacha::ChaCha8Rng;

use crate::error::SimError;
use crate::learning::{
    combine_weighted_majority, rational_belief, EnsembleState, InitialWeights, SupplyRule,
};
use crate::model::{
    config_digest, AgentSetup, AgentSpec, History, LearnerKind, PredictorWeight, RoundRecord,
    ScenarioConfig, SimulationResult, WeightResetEvent,
};
use crate::predictors::{sample_predictor_set, PredictionContext};
use crate::rng::{stream_rng, StreamDomain};

/// Runtime state of a weighted-majority agent's ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleRuntime {
    pub state: EnsembleState,
    rngs: Vec<ChaCha8Rng>,
    last_outputs: Vec<f64>,
    reset_during_predict: bool,
}

impl EnsembleRuntime {
    fn predict(&mut self, ctx: &PredictionContext<'_>) -> Result<f64, SimError> {
        self.last_outputs.clear();
        for (slot, kind) in self.state.predictors.iter().enumerate() {
            self.last_outputs.push(kind.predict(ctx, &mut self.rngs[slot]));
        }
        match combine_weighted_majority(&self.last_outputs, &self.state.weights) {
            Ok(prediction) => Ok(prediction),
            Err(SimError::DegenerateEnsemble) => {
                self.state.reset_uniform();
                self.reset_during_predict = true;
                combine_weighted_majority(&self.last_outputs, &self.state.weights)
            }
            Err(err) => Err(err),
        }
    }
}

/// One agent's full runtime state.
#[derive(Debug, Clone)]
pub struct AgentState {
    pub spec: AgentSpec,
    pub learner: LearnerState,
}

#[derive(Debug, Clone)]
pub enum LearnerState {
    Rational,
    Ensemble(EnsembleRuntime),
}

impl AgentState {
    fn predict(&mut self, ctx: &PredictionContext<'_>) -> Result<f64, SimError> {
        match &mut self.learner {
            LearnerState::Rational => Ok(rational_belief(ctx.history, ctx.prior_demand)),
            LearnerState::Ensemble(runtime) => runtime.predict(ctx),
        }
    }

    /// Ensemble weights at this point in the run; empty for rational agents.
    pub fn final_weights(&self) -> Vec<PredictorWeight> {
        match &self.learner {
            LearnerState::Rational => Vec::new(),
            LearnerState::Ensemble(runtime) => runtime
                .state
                .predictors
                .iter()
                .zip(&runtime.state.weights)
                .map(|(predictor, &weight)| PredictorWeight {
                    predictor: predictor.clone(),
                    weight,
                })
                .collect(),
        }
    }
}

/// Round-invariant parameters threaded through `step_round`.
#[derive(Debug, Clone, Copy)]
pub struct StepParams {
    pub prior_demand: f64,
    pub supply_rule: SupplyRule,
}

/// What one round produced: the record plus any agents whose ensemble
/// weights had to be reset to uniform.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub record: RoundRecord,
    pub weight_resets: Vec<usize>,
}

/// Instantiate the agent population described by the config, drawing
/// generated capacities from the scenario seed.
pub fn materialize_agent_specs(config: &ScenarioConfig) -> Result<Vec<AgentSpec>, SimError> {
    match &config.agents {
        AgentSetup::Explicit(specs) => Ok(specs.clone()),
        AgentSetup::Generate {
            learner,
            capacity_range,
            predictor_pool_size,
        } => {
            let mut rng = stream_rng(config.seed, StreamDomain::Capacity, 0, 0);
            let demand_range = config.demand_process.per_agent_bounds(config.n_agents);
            let lo = capacity_range.0.ceil() as i64;
            let hi = capacity_range.1.floor() as i64;
            Ok((0..config.n_agents)
                .map(|id| AgentSpec {
                    id,
                    max_supply: rand::Rng::random_range(&mut rng, lo..=hi) as f64,
                    demand_range,
                    learner: *learner,
                    predictor_pool_size: *predictor_pool_size,
                })
                .collect())
        }
    }
}

/// Bootstrap belief: the configured prior, or the sum of the agents' demand
/// range midpoints when unset.
pub fn resolved_prior_demand(config: &ScenarioConfig, specs: &[AgentSpec]) -> f64 {
    config.prior_demand.unwrap_or_else(|| {
        specs
            .iter()
            .map(|spec| (spec.demand_range.0 + spec.demand_range.1) / 2.0)
            .sum()
    })
}

/// Build runtime agent states: ensembles are sampled from the pool and given
/// their initial weights and per-slot RNG streams.
pub fn build_agent_states(config: &ScenarioConfig) -> Result<Vec<AgentState>, SimError> {
    let specs = materialize_agent_specs(config)?;
    specs
        .into_iter()
        .map(|spec| {
            let learner = match spec.learner {
                LearnerKind::Rational => LearnerState::Rational,
                LearnerKind::WeightedMajority => {
                    let k = spec.predictor_pool_size.ok_or_else(|| {
                        SimError::config(
                            "predictor_pool_size",
                            format!("agent {} is weighted-majority but has no k", spec.id),
                        )
                    })?;
                    let agent_id = spec.id as u64;
                    let mut pool_rng =
                        stream_rng(config.seed, StreamDomain::PredictorPool, agent_id, 0);
                    let predictors =
                        sample_predictor_set(&config.predictor_pool, k, &mut pool_rng)?;
                    let state = match config.initial_weights {
                        InitialWeights::Uniform => EnsembleState::uniform(
                            predictors,
                            config.beta,
                            config.upsilon_max,
                            config.epsilon_floor,
                        ),
                        InitialWeights::Random => {
                            let mut weight_rng = stream_rng(
                                config.seed,
                                StreamDomain::InitialWeights,
                                agent_id,
                                0,
                            );
                            let weights: Vec<f64> = (0..k)
                                .map(|_| 1.0 - rand::Rng::random::<f64>(&mut weight_rng))
                                .collect();
                            EnsembleState::with_weights(
                                predictors,
                                weights,
                                config.beta,
                                config.upsilon_max,
                                config.epsilon_floor,
                            )?
                        }
                    };
                    let rngs = (0..k)
                        .map(|slot| {
                            stream_rng(config.seed, StreamDomain::Predictor, agent_id, slot as u64)
                        })
                        .collect();
                    LearnerState::Ensemble(EnsembleRuntime {
                        state,
                        rngs,
                        last_outputs: Vec::with_capacity(k),
                        reset_during_predict: false,
                    })
                }
            };
            Ok(AgentState { spec, learner })
        })
        .collect()
}

/// Execute one round against the given history and demand draw.
///
/// Per-agent decisions depend only on the history, the agent's own state,
/// and the agent's own RNG streams, so agent evaluation order cannot change
/// the outcome. Ensemble weights are updated only after the aggregates are
/// computed.
pub fn step_round(
    history: &History,
    agents: &mut [AgentState],
    demand_draw: &[f64],
    params: &StepParams,
) -> Result<StepOutcome, SimError> {
    if demand_draw.len() != agents.len() {
        return Err(SimError::structural(format!(
            "demand draw has {} entries for {} agents",
            demand_draw.len(),
            agents.len()
        )));
    }
    for (agent, &draw) in agents.iter().zip(demand_draw) {
        let (lo, hi) = agent.spec.demand_range;
        if !(draw.is_finite() && draw >= lo && draw <= hi) {
            return Err(SimError::structural(format!(
                "demand draw {draw} for agent {} outside its range [{lo}, {hi}]",
                agent.spec.id
            )));
        }
    }

    let t = history.len();
    let total_demand: f64 = demand_draw.iter().sum();
    let ctx = PredictionContext {
        history,
        upcoming_total_demand: total_demand,
        prior_demand: params.prior_demand,
        round: t,
    };

    let n_agents = agents.len();
    let mut predictions = Vec::with_capacity(n_agents);
    let mut supplies = Vec::with_capacity(n_agents);
    for agent in agents.iter_mut() {
        let prediction = agent.predict(&ctx)?;
        let supply = params
            .supply_rule
            .supply(history, prediction, n_agents, agent.spec.max_supply);
        predictions.push(prediction);
        supplies.push(supply);
    }
    let total_supply: f64 = supplies.iter().sum();

    let mut weight_resets = Vec::new();
    for (i, agent) in agents.iter_mut().enumerate() {
        if let LearnerState::Ensemble(runtime) = &mut agent.learner {
            let reset = runtime
                .state
                .update_and_normalize(&runtime.last_outputs, total_demand)?;
            if reset || std::mem::take(&mut runtime.reset_during_predict) {
                weight_resets.push(i);
            }
        }
    }

    Ok(StepOutcome {
        record: RoundRecord {
            t,
            demands: demand_draw.to_vec(),
            predictions,
            supplies,
            total_demand,
            total_supply,
        },
        weight_resets,
    })
}

/// Run a full scenario. Bit-reproducible for a fixed config: the same config
/// always yields the same `SimulationResult`.
pub fn run_simulation(config: &ScenarioConfig) -> Result<SimulationResult, SimError> {
    config.validate()?;
    let mut agents = build_agent_states(config)?;
    let prior_demand = resolved_prior_demand(
        config,
        &agents.iter().map(|a| a.spec.clone()).collect::<Vec<_>>(),
    );
    let params = StepParams {
        prior_demand,
        supply_rule: config.supply_rule,
    };

    let mut demand_rng = stream_rng(config.seed, StreamDomain::Demand, 0, 0);
    let mut history = History::new();
    let mut weight_resets = Vec::new();
    for t in 0..config.n_rounds {
        let draw = config
            .demand_process
            .generate(t, config.n_agents, &mut demand_rng);
        let outcome = step_round(&history, &mut agents, &draw, &params)?;
        weight_resets.extend(
            outcome
                .weight_resets
                .into_iter()
                .map(|agent| WeightResetEvent { round: t, agent }),
        );
        history.push(outcome.record)?;
    }

    Ok(SimulationResult {
        config_digest: config_digest(config),
        rounds: history.into_records(),
        per_agent_final_weights: agents.iter().map(AgentState::final_weights).collect(),
        weight_resets,
    })
}
