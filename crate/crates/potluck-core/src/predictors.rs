//! The predictor pool: five simple forecasters of next-round total demand.
//!
//! Predictors read only the aggregate `(D, S)` history. The oracle is the one
//! exception: the engine draws the round's demand first and hands the true
//! total to oracle slots only, revealing it to everyone else at weight-update
//! time.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::model::History;

/// A predictor's identity and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum PredictorKind {
    /// Mean aggregate demand over the last `window` rounds.
    MeanWindow { window: usize },
    /// The aggregate demand of one uniformly chosen round among the last
    /// `window`.
    RandomWindow { window: usize },
    /// Last round's aggregate demand.
    Rational,
    /// The true total demand of the round being predicted.
    Oracle,
    /// `max(0, base + amplitude * sin(2*pi*t / period))`.
    TimeVarying { base: f64, amplitude: f64, period: f64 },
}

impl PredictorKind {
    pub(crate) fn validate(&self) -> Result<(), String> {
        match self {
            PredictorKind::MeanWindow { window } | PredictorKind::RandomWindow { window } => {
                if *window < 1 {
                    return Err("window must be at least 1".into());
                }
            }
            PredictorKind::Rational | PredictorKind::Oracle => {}
            PredictorKind::TimeVarying {
                base,
                amplitude,
                period,
            } => {
                if !(base.is_finite() && *base >= 0.0) {
                    return Err("base must be finite and >= 0".into());
                }
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err("amplitude must be finite and >= 0".into());
                }
                if !(period.is_finite() && *period > 0.0) {
                    return Err("period must be finite and > 0".into());
                }
            }
        }
        Ok(())
    }

    /// Evaluate this predictor for the upcoming round.
    pub fn predict(&self, ctx: &PredictionContext<'_>, rng: &mut impl Rng) -> f64 {
        match *self {
            PredictorKind::MeanWindow { window } => {
                predict_mean_window(ctx.history, window, ctx.prior_demand)
            }
            PredictorKind::RandomWindow { window } => {
                predict_random_window(ctx.history, window, ctx.prior_demand, rng)
            }
            PredictorKind::Rational => predict_rational(ctx.history, ctx.prior_demand),
            PredictorKind::Oracle => predict_oracle(ctx.upcoming_total_demand),
            PredictorKind::TimeVarying {
                base,
                amplitude,
                period,
            } => predict_time_varying(ctx.round, base, amplitude, period),
        }
    }
}

/// Everything a predictor may look at when forecasting round `round`.
#[derive(Debug, Clone, Copy)]
pub struct PredictionContext<'a> {
    pub history: &'a History,
    /// True total demand of the round being predicted; oracle slots only.
    pub upcoming_total_demand: f64,
    /// Output of the history-based predictors while history is empty.
    pub prior_demand: f64,
    pub round: usize,
}

/// Arithmetic mean of the last `min(window, available)` aggregate demands;
/// `prior_demand` on empty history.
pub fn predict_mean_window(history: &History, window: usize, prior_demand: f64) -> f64 {
    let demands = history.window_demands(window);
    if demands.is_empty() {
        prior_demand
    } else {
        demands.iter().sum::<f64>() / demands.len() as f64
    }
}

/// One uniformly selected demand among the last `min(window, available)`
/// rounds; `prior_demand` on empty history.
pub fn predict_random_window(
    history: &History,
    window: usize,
    prior_demand: f64,
    rng: &mut impl Rng,
) -> f64 {
    let demands = history.window_demands(window);
    if demands.is_empty() {
        prior_demand
    } else {
        demands[rng.random_range(0..demands.len())]
    }
}

/// Last observed aggregate demand; `prior_demand` on empty history.
pub fn predict_rational(history: &History, prior_demand: f64) -> f64 {
    history.last_total_demand().unwrap_or(prior_demand)
}

/// The true demand of the round being predicted, exactly.
pub fn predict_oracle(upcoming_demand: f64) -> f64 {
    upcoming_demand
}

/// Sinusoidal forecast clamped at zero.
pub fn predict_time_varying(t: usize, base: f64, amplitude: f64, period: f64) -> f64 {
    let phase = std::f64::consts::TAU * t as f64 / period;
    (base + amplitude * phase.sin()).max(0.0)
}

/// The full built-in pool: windowed mean, windowed random choice, rational,
/// oracle, and a day/night-style sinusoid around `time_varying_base`.
pub fn stock_predictor_pool(window: usize, time_varying_base: f64) -> Vec<PredictorKind> {
    vec![
        PredictorKind::MeanWindow { window },
        PredictorKind::RandomWindow { window },
        PredictorKind::Rational,
        PredictorKind::Oracle,
        PredictorKind::TimeVarying {
            base: time_varying_base,
            amplitude: time_varying_base / 2.0,
            period: 24.0,
        },
    ]
}

/// Sample `k` distinct predictors from the pool, without replacement.
pub fn sample_predictor_set(
    pool: &[PredictorKind],
    k: usize,
    rng: &mut impl Rng,
) -> Result<Vec<PredictorKind>, SimError> {
    if k < 1 || k > pool.len() {
        return Err(SimError::config(
            "predictor_pool_size",
            format!("k = {k} must lie in [1, {}]", pool.len()),
        ));
    }
    let indices = rand::seq::index::sample(rng, pool.len(), k);
    Ok(indices.iter().map(|i| pool[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn demand_history(demands: &[f64]) -> History {
        let totals: Vec<(f64, f64)> = demands.iter().map(|&d| (d, 0.0)).collect();
        History::from_totals(&totals)
    }

    #[test]
    fn mean_window_examples() {
        let history = demand_history(&[10.0, 20.0, 30.0]);
        assert_eq!(predict_mean_window(&history, 10, 0.0), 20.0);
        assert_eq!(predict_mean_window(&history, 2, 0.0), 25.0);
        assert_eq!(predict_mean_window(&History::new(), 10, 500.0), 500.0);
    }

    #[test]
    fn random_window_single_candidate_and_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let history = demand_history(&[42.0]);
        for _ in 0..16 {
            assert_eq!(predict_random_window(&history, 10, 0.0, &mut rng), 42.0);
        }
        assert_eq!(
            predict_random_window(&History::new(), 10, 500.0, &mut rng),
            500.0
        );
    }

    #[test]
    fn random_window_is_uniform_over_the_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let history = demand_history(&[10.0, 20.0]);
        let draws = 10_000;
        let mut hits = 0usize;
        for _ in 0..draws {
            if predict_random_window(&history, 2, 0.0, &mut rng) == 10.0 {
                hits += 1;
            }
        }
        let freq = hits as f64 / draws as f64;
        assert!((freq - 0.5).abs() <= 0.02, "freq = {freq}");
    }

    #[test]
    fn rational_examples() {
        assert_eq!(
            predict_rational(&demand_history(&[10.0, 20.0, 30.0]), 0.0),
            30.0
        );
        assert_eq!(predict_rational(&demand_history(&[7.0, 7.0, 7.0]), 0.0), 7.0);
        assert_eq!(predict_rational(&History::new(), 500.0), 500.0);
    }

    #[test]
    fn oracle_is_exact() {
        assert_eq!(predict_oracle(48_200.0), 48_200.0);
        assert_eq!(predict_oracle(0.0), 0.0);
    }

    #[test]
    fn time_varying_examples() {
        assert_eq!(predict_time_varying(9, 100.0, 0.0, 4.0), 100.0);
        let peak = predict_time_varying(1, 100.0, 50.0, 4.0);
        assert!((peak - 150.0).abs() < 1e-9, "peak = {peak}");
        // sin(3*pi/2) = -1 puts the raw value at -40; clamp to zero.
        assert_eq!(predict_time_varying(3, 10.0, 50.0, 4.0), 0.0);
    }

    #[test]
    fn sample_full_pool_and_singleton() {
        let pool = stock_predictor_pool(10, 1000.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);

        let mut all = sample_predictor_set(&pool, 5, &mut rng).unwrap();
        assert_eq!(all.len(), 5);
        for kind in &pool {
            assert!(all.contains(kind), "missing {kind:?}");
        }
        all.dedup();
        assert_eq!(all.len(), 5);

        let one = sample_predictor_set(&pool, 1, &mut rng).unwrap();
        assert_eq!(one.len(), 1);
        assert!(pool.contains(&one[0]));
    }

    #[test]
    fn sample_rejects_out_of_range_k() {
        let pool = stock_predictor_pool(10, 1000.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(sample_predictor_set(&pool, 6, &mut rng).is_err());
        assert!(sample_predictor_set(&pool, 0, &mut rng).is_err());
    }

    #[test]
    fn predictors_are_pure_given_rng_state() {
        let history = demand_history(&[5.0, 15.0, 25.0, 35.0]);
        let ctx = PredictionContext {
            history: &history,
            upcoming_total_demand: 40.0,
            prior_demand: 20.0,
            round: 4,
        };
        for kind in stock_predictor_pool(3, 30.0) {
            let mut a = ChaCha8Rng::seed_from_u64(11);
            let mut b = ChaCha8Rng::seed_from_u64(11);
            assert_eq!(kind.predict(&ctx, &mut a), kind.predict(&ctx, &mut b));
        }
    }
}
