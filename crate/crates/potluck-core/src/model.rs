//! Domain types for the repeated potluck game: agents, per-round records,
//! the shared history channel, and the scenario configuration.

use serde::{Deserialize, Serialize};

use crate::demand::DemandProcess;
use crate::error::SimError;
use crate::learning::{InitialWeights, SupplyRule};
use crate::predictors::{stock_predictor_pool, PredictorKind};

/// How an agent forms its demand belief each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    /// Best reply: believe next total demand equals the last observed one.
    Rational,
    /// Weighted-majority ensemble over a sampled set of predictors.
    WeightedMajority,
}

/// One agent's static parameters.
///
/// `demand_range` bounds that agent's per-round consumption draws and is used
/// to derive the default bootstrap belief (sum of range midpoints).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub id: usize,
    pub max_supply: f64,
    pub demand_range: (f64, f64),
    pub learner: LearnerKind,
    /// Number of predictors sampled from the global pool; weighted-majority
    /// agents only.
    #[serde(default)]
    pub predictor_pool_size: Option<usize>,
}

/// The ledger of one completed round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: usize,
    pub demands: Vec<f64>,
    pub predictions: Vec<f64>,
    pub supplies: Vec<f64>,
    pub total_demand: f64,
    pub total_supply: f64,
}

impl RoundRecord {
    /// Signed parity gap `S_t - D_t`: negative is starvation, positive is
    /// excess, zero is equilibrium.
    pub fn parity_gap(&self) -> f64 {
        self.total_supply - self.total_demand
    }
}

/// Append-only record of completed rounds.
///
/// This is the game's only shared information channel: agent decision code
/// must read nothing but the aggregate `(D, S)` series exposed here, never
/// other agents' per-agent columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct History {
    records: Vec<RoundRecord>,
    totals_demand: Vec<f64>,
    totals_supply: Vec<f64>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    /// Synthetic single-agent history from an aggregate `(D, S)` series.
    /// Handy for exercising predictors against a hand-written demand stream.
    pub fn from_totals(totals: &[(f64, f64)]) -> Self {
        let mut history = History::new();
        for (t, &(d, s)) in totals.iter().enumerate() {
            let record = RoundRecord {
                t,
                demands: vec![d],
                predictions: vec![0.0],
                supplies: vec![s],
                total_demand: d,
                total_supply: s,
            };
            history.push(record).expect("sequential rounds");
        }
        history
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Appends the next round. Rounds must arrive strictly in order, with no
    /// gaps; once appended a record is never mutated.
    pub fn push(&mut self, record: RoundRecord) -> Result<(), SimError> {
        if record.t != self.records.len() {
            return Err(SimError::structural(format!(
                "history expects round {}, got round {}",
                self.records.len(),
                record.t
            )));
        }
        self.totals_demand.push(record.total_demand);
        self.totals_supply.push(record.total_supply);
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[RoundRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<RoundRecord> {
        self.records
    }

    /// Aggregate demand series `D_0 .. D_{t-1}`.
    pub fn total_demands(&self) -> &[f64] {
        &self.totals_demand
    }

    /// Aggregate supply series `S_0 .. S_{t-1}`.
    pub fn total_supplies(&self) -> &[f64] {
        &self.totals_supply
    }

    /// `(D, S)` of the most recent round, if any.
    pub fn last_totals(&self) -> Option<(f64, f64)> {
        match (self.totals_demand.last(), self.totals_supply.last()) {
            (Some(&d), Some(&s)) => Some((d, s)),
            _ => None,
        }
    }

    pub fn last_total_demand(&self) -> Option<f64> {
        self.totals_demand.last().copied()
    }

    /// The last `min(window, len)` aggregate demands.
    pub fn window_demands(&self, window: usize) -> &[f64] {
        let m = window.min(self.totals_demand.len());
        &self.totals_demand[self.totals_demand.len() - m..]
    }
}

/// How the agent population is constructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum AgentSetup {
    /// Draw `n_agents` homogeneous agents; capacities are integer-uniform in
    /// `capacity_range`, drawn once at setup from the scenario seed.
    Generate {
        learner: LearnerKind,
        capacity_range: (f64, f64),
        predictor_pool_size: Option<usize>,
    },
    /// Fully explicit per-agent specs.
    Explicit(Vec<AgentSpec>),
}

/// Complete, seedable description of one experiment.
///
/// Deserializes directly from the TOML config file; absent keys fall back to
/// the defaults below (the 100-agent uniform-demand benchmark scenario).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub n_agents: usize,
    pub n_rounds: usize,
    pub seed: u64,
    /// Weight-update base, in (0, 1).
    pub beta: f64,
    /// History window for the windowed predictors.
    pub window: usize,
    /// Every predictor's output while history is empty. Defaults to the sum
    /// of the agents' demand-range midpoints.
    pub prior_demand: Option<f64>,
    /// Clamp for the weight-update exponent.
    pub upsilon_max: f64,
    /// Denominator guard for the weight-update ratio.
    pub epsilon_floor: f64,
    pub initial_weights: InitialWeights,
    pub supply_rule: SupplyRule,
    pub agents: AgentSetup,
    pub demand_process: DemandProcess,
    pub predictor_pool: Vec<PredictorKind>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_agents: 100,
            n_rounds: 1000,
            seed: 0,
            beta: 0.5,
            window: 10,
            prior_demand: None,
            upsilon_max: 10.0,
            epsilon_floor: 1e-9,
            initial_weights: InitialWeights::Uniform,
            supply_rule: SupplyRule::FairShare,
            agents: AgentSetup::Generate {
                learner: LearnerKind::WeightedMajority,
                capacity_range: (500.0, 1000.0),
                predictor_pool_size: Some(5),
            },
            demand_process: DemandProcess::UniformPerAgent {
                lo: 0.0,
                hi: 1000.0,
                integer: false,
            },
            predictor_pool: stock_predictor_pool(10, 50_000.0),
        }
    }
}

impl ScenarioConfig {
    /// Checks every config invariant, naming the violated field.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n_agents < 1 {
            return Err(SimError::config("n_agents", "must be at least 1"));
        }
        if self.n_rounds < 1 {
            return Err(SimError::config("n_rounds", "must be at least 1"));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(SimError::config("beta", "must lie in (0,1)"));
        }
        if self.window < 1 {
            return Err(SimError::config("window", "must be at least 1"));
        }
        if !(self.upsilon_max >= 1.0 && self.upsilon_max.is_finite()) {
            return Err(SimError::config("upsilon_max", "must be finite and >= 1"));
        }
        if !(self.epsilon_floor > 0.0 && self.epsilon_floor.is_finite()) {
            return Err(SimError::config("epsilon_floor", "must be finite and > 0"));
        }
        if let Some(prior) = self.prior_demand {
            if !(prior >= 0.0 && prior.is_finite()) {
                return Err(SimError::config("prior_demand", "must be finite and >= 0"));
            }
        }
        self.demand_process.validate()?;
        for (i, kind) in self.predictor_pool.iter().enumerate() {
            kind.validate()
                .map_err(|message| SimError::config(format!("predictor_pool[{i}]"), message))?;
        }
        self.validate_agents()
    }

    fn validate_agents(&self) -> Result<(), SimError> {
        let pool_len = self.predictor_pool.len();
        let bounds = self.demand_process.per_agent_bounds(self.n_agents);
        match &self.agents {
            AgentSetup::Generate {
                learner,
                capacity_range,
                predictor_pool_size,
            } => {
                let (lo, hi) = *capacity_range;
                if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
                    return Err(SimError::config(
                        "agents.capacity_range",
                        "bounds must be finite with 0 <= lo <= hi",
                    ));
                }
                if lo.ceil() > hi.floor() {
                    return Err(SimError::config(
                        "agents.capacity_range",
                        "contains no integer capacity",
                    ));
                }
                if *learner == LearnerKind::WeightedMajority {
                    check_pool_size("agents.predictor_pool_size", *predictor_pool_size, pool_len)?;
                }
                Ok(())
            }
            AgentSetup::Explicit(specs) => {
                if specs.len() != self.n_agents {
                    return Err(SimError::config(
                        "agents",
                        format!("{} specs given but n_agents = {}", specs.len(), self.n_agents),
                    ));
                }
                for (i, spec) in specs.iter().enumerate() {
                    let field = format!("agents[{i}]");
                    if spec.id != i {
                        return Err(SimError::config(field, format!("id must be {i}")));
                    }
                    if !(spec.max_supply >= 0.0 && spec.max_supply.is_finite()) {
                        return Err(SimError::config(
                            format!("{field}.max_supply"),
                            "must be finite and >= 0",
                        ));
                    }
                    let (lo, hi) = spec.demand_range;
                    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
                        return Err(SimError::config(
                            format!("{field}.demand_range"),
                            "bounds must be finite with 0 <= lo <= hi",
                        ));
                    }
                    if lo > bounds.0 || hi < bounds.1 {
                        return Err(SimError::config(
                            format!("{field}.demand_range"),
                            format!(
                                "must contain the demand process range [{}, {}]",
                                bounds.0, bounds.1
                            ),
                        ));
                    }
                    if spec.learner == LearnerKind::WeightedMajority {
                        check_pool_size(
                            format!("{field}.predictor_pool_size"),
                            spec.predictor_pool_size,
                            pool_len,
                        )?;
                    }
                }
                Ok(())
            }
        }
    }
}

fn check_pool_size(
    field: impl Into<String>,
    k: Option<usize>,
    pool_len: usize,
) -> Result<(), SimError> {
    match k {
        None => Err(SimError::config(
            field,
            "required for weighted-majority agents",
        )),
        Some(0) => Err(SimError::config(field, "must be at least 1")),
        Some(k) if k > pool_len => Err(SimError::config(
            field,
            format!("{k} exceeds predictor pool size {pool_len}"),
        )),
        Some(_) => Ok(()),
    }
}

/// Stable 64-bit digest of a config, identical for identical configs.
pub fn config_digest(config: &ScenarioConfig) -> u64 {
    let canonical = serde_json::to_string(config).expect("config serializes");
    // FNV-1a: fixed constants, no per-process hash seeding.
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in canonical.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Final weight of one predictor slot in an agent's ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorWeight {
    pub predictor: PredictorKind,
    pub weight: f64,
}

/// A round in which an agent's ensemble weights were reset to uniform after
/// the unnormalized sum collapsed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightResetEvent {
    pub round: usize,
    pub agent: usize,
}

/// Everything a finished simulation produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub config_digest: u64,
    pub rounds: Vec<RoundRecord>,
    /// Per-agent ensembles at termination; empty for rational agents.
    pub per_agent_final_weights: Vec<Vec<PredictorWeight>>,
    pub weight_resets: Vec<WeightResetEvent>,
}
