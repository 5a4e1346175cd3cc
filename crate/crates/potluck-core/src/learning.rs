//! Weighted-majority combination, the multiplicative beta^upsilon weight
//! update with normalization, the rational baseline, supply rules, and the
//! epsilon-predictive checker.

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::model::History;
use crate::predictors::{predict_rational, PredictorKind};

/// How a weighted-majority agent's weights start out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialWeights {
    /// Equal weights 1/k.
    Uniform,
    /// Random positive weights, normalized.
    Random,
}

/// Maps an agent's demand belief to the quantity it supplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupplyRule {
    /// Fair share of the predicted total: `clamp(P / N, 0, max_supply)`.
    FairShare,
    /// Binary all-or-nothing reaction to the last round's parity: supply
    /// `max_supply` if the previous round starved, 0 otherwise (and 0 on the
    /// first round). With unit capacities this is the classic bar-game
    /// strategy set {0, 1}.
    LastGapThreshold,
}

impl SupplyRule {
    pub fn supply(
        &self,
        history: &History,
        prediction: f64,
        n_agents: usize,
        max_supply: f64,
    ) -> f64 {
        match self {
            SupplyRule::FairShare => decide_supply(prediction, n_agents, max_supply),
            SupplyRule::LastGapThreshold => match history.last_totals() {
                Some((d, s)) if s < d => max_supply,
                _ => 0.0,
            },
        }
    }
}

/// Fair-share supply decision: the agent covers its 1/N share of the
/// predicted total demand, capped by its capacity.
pub fn decide_supply(prediction: f64, n_agents: usize, max_supply: f64) -> f64 {
    (prediction / n_agents as f64).clamp(0.0, max_supply)
}

/// Best-reply belief: next total demand equals the last observed one.
pub fn rational_belief(history: &History, prior_demand: f64) -> f64 {
    predict_rational(history, prior_demand)
}

/// The multiplicative penalty applied to one predictor's weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateFactor {
    /// Accuracy exponent, >= 1; 1 means a perfect prediction.
    pub upsilon: f64,
    /// `beta^upsilon`, in (0, beta].
    pub factor: f64,
}

/// Accuracy exponent and penalty for a prediction `O` against actual `D`:
/// `upsilon = max(O/D, D/O)` with denominators floored at `epsilon_floor`,
/// clamped to `[1, upsilon_max]`; the factor is `beta^upsilon`.
pub fn weight_update_factor(
    prediction: f64,
    actual: f64,
    beta: f64,
    upsilon_max: f64,
    epsilon_floor: f64,
) -> UpdateFactor {
    let over = prediction / actual.max(epsilon_floor);
    let under = actual / prediction.max(epsilon_floor);
    let upsilon = over.max(under).clamp(1.0, upsilon_max);
    UpdateFactor {
        upsilon,
        factor: beta.powf(upsilon),
    }
}

/// Weighted-majority forecast: the weight-normalized average of the
/// predictor outputs. Errors with [`SimError::DegenerateEnsemble`] when the
/// weights sum to zero (callers reset to uniform weights).
pub fn combine_weighted_majority(outputs: &[f64], weights: &[f64]) -> Result<f64, SimError> {
    if outputs.is_empty() || outputs.len() != weights.len() {
        return Err(SimError::structural(format!(
            "combine needs equal nonzero lengths, got {} outputs and {} weights",
            outputs.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return Err(SimError::structural(
            "predictor weights must be finite and nonnegative",
        ));
    }
    let weight_sum: f64 = weights.iter().sum();
    if weight_sum <= 0.0 {
        return Err(SimError::DegenerateEnsemble);
    }
    let combined = outputs
        .iter()
        .zip(weights)
        .map(|(o, w)| o * w)
        .sum::<f64>()
        / weight_sum;
    let lo = outputs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = outputs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(combined.clamp(lo, hi))
}

/// One agent's predictor ensemble: the sampled predictors, their weights,
/// and the update-rule parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleState {
    pub predictors: Vec<PredictorKind>,
    pub weights: Vec<f64>,
    pub beta: f64,
    pub upsilon_max: f64,
    pub epsilon_floor: f64,
}

impl EnsembleState {
    pub fn uniform(
        predictors: Vec<PredictorKind>,
        beta: f64,
        upsilon_max: f64,
        epsilon_floor: f64,
    ) -> Self {
        let k = predictors.len();
        EnsembleState {
            predictors,
            weights: vec![1.0 / k as f64; k],
            beta,
            upsilon_max,
            epsilon_floor,
        }
    }

    pub fn with_weights(
        predictors: Vec<PredictorKind>,
        weights: Vec<f64>,
        beta: f64,
        upsilon_max: f64,
        epsilon_floor: f64,
    ) -> Result<Self, SimError> {
        if predictors.is_empty() || predictors.len() != weights.len() {
            return Err(SimError::structural(
                "ensemble needs equally many predictors and weights, at least one each",
            ));
        }
        if weights.iter().any(|w| *w <= 0.0 || !w.is_finite()) {
            return Err(SimError::structural("initial weights must be positive"));
        }
        let mut state = EnsembleState {
            predictors,
            weights,
            beta,
            upsilon_max,
            epsilon_floor,
        };
        state.normalize();
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.predictors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictors.is_empty()
    }

    pub fn reset_uniform(&mut self) {
        let k = self.weights.len();
        self.weights.fill(1.0 / k as f64);
    }

    fn normalize(&mut self) {
        let sum: f64 = self.weights.iter().sum();
        for w in &mut self.weights {
            *w /= sum;
            // A weight may underflow to literal zero over a long run; keep
            // every weight strictly positive so no predictor is annihilated.
            if *w < f64::MIN_POSITIVE {
                *w = f64::MIN_POSITIVE;
            }
        }
    }

    /// Multiply every weight by its `beta^upsilon` penalty against the
    /// revealed actual demand, then renormalize to sum 1. Returns `true` when
    /// the unnormalized sum collapsed and the weights were reset to uniform.
    pub fn update_and_normalize(&mut self, outputs: &[f64], actual: f64) -> Result<bool, SimError> {
        if outputs.len() != self.weights.len() {
            return Err(SimError::structural(format!(
                "update expects {} outputs, got {}",
                self.weights.len(),
                outputs.len()
            )));
        }
        for (weight, &output) in self.weights.iter_mut().zip(outputs) {
            let update = weight_update_factor(
                output,
                actual,
                self.beta,
                self.upsilon_max,
                self.epsilon_floor,
            );
            *weight *= update.factor;
        }
        let sum: f64 = self.weights.iter().sum();
        if sum <= 0.0 || !sum.is_finite() {
            self.reset_uniform();
            return Ok(true);
        }
        self.normalize();
        Ok(false)
    }
}

/// Per-round record of whether a belief sequence stayed within `epsilon` of
/// the actual demands.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonCheck {
    pub epsilon: f64,
    pub satisfied: Vec<bool>,
}

impl EpsilonCheck {
    /// True iff the bound held at every round.
    pub fn holds(&self) -> bool {
        self.satisfied.iter().all(|&ok| ok)
    }
}

/// Check `|P_t - D_t| <= epsilon` round by round.
pub fn is_epsilon_predictive(
    predictions: &[f64],
    actuals: &[f64],
    epsilon: f64,
) -> Result<EpsilonCheck, SimError> {
    if predictions.len() != actuals.len() {
        return Err(SimError::structural(format!(
            "predictions ({}) and actuals ({}) differ in length",
            predictions.len(),
            actuals.len()
        )));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(SimError::structural("epsilon must be >= 0"));
    }
    let satisfied = predictions
        .iter()
        .zip(actuals)
        .map(|(p, d)| (p - d).abs() <= epsilon)
        .collect();
    Ok(EpsilonCheck { epsilon, satisfied })
}
