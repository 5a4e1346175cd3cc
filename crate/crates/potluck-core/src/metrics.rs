//! Parity statistics for single runs and paired comparisons between learners.

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::model::SimulationResult;

/// Summary statistics of one run's demand-supply parity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub mean_total_demand: f64,
    pub mean_total_supply: f64,
    pub mean_abs_gap: f64,
    pub max_abs_gap: f64,
    pub starvation_rounds: usize,
    pub excess_rounds: usize,
    pub equilibrium_rounds: usize,
}

/// Compute [`RunStats`] from a completed run.
pub fn run_stats(result: &SimulationResult) -> Result<RunStats, SimError> {
    if result.rounds.is_empty() {
        return Err(SimError::structural("run has no rounds"));
    }
    let n = result.rounds.len() as f64;
    let mut stats = RunStats {
        mean_total_demand: 0.0,
        mean_total_supply: 0.0,
        mean_abs_gap: 0.0,
        max_abs_gap: 0.0,
        starvation_rounds: 0,
        excess_rounds: 0,
        equilibrium_rounds: 0,
    };
    for round in &result.rounds {
        let gap = round.parity_gap();
        stats.mean_total_demand += round.total_demand;
        stats.mean_total_supply += round.total_supply;
        stats.mean_abs_gap += gap.abs();
        stats.max_abs_gap = stats.max_abs_gap.max(gap.abs());
        if gap < 0.0 {
            stats.starvation_rounds += 1;
        } else if gap > 0.0 {
            stats.excess_rounds += 1;
        } else {
            stats.equilibrium_rounds += 1;
        }
    }
    stats.mean_total_demand /= n;
    stats.mean_total_supply /= n;
    stats.mean_abs_gap /= n;
    Ok(stats)
}

/// Paired statistics of a candidate learner against a baseline, both run on
/// the identical demand realization.
///
/// `outperform_fraction` is the share of rounds where the candidate's |gap|
/// is strictly smaller. `mean_improvement` is `1 - mean|gap|_candidate /
/// mean|gap|_baseline`. `best_improvement` is the largest per-round relative
/// improvement; rounds where the baseline gap is zero are excluded from it
/// and counted in `zero_baseline_rounds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub outperform_fraction: f64,
    pub mean_improvement: f64,
    pub best_improvement: f64,
    pub zero_baseline_rounds: usize,
    pub candidate_gaps: Vec<f64>,
    pub baseline_gaps: Vec<f64>,
}

/// Compare a candidate run against a baseline run over identical demands.
pub fn compare_runs(
    candidate: &SimulationResult,
    baseline: &SimulationResult,
) -> Result<ComparisonReport, SimError> {
    if candidate.rounds.is_empty() {
        return Err(SimError::structural("runs have no rounds"));
    }
    if candidate.rounds.len() != baseline.rounds.len() {
        return Err(SimError::Comparison(format!(
            "round counts differ: {} vs {}",
            candidate.rounds.len(),
            baseline.rounds.len()
        )));
    }
    for (a, b) in candidate.rounds.iter().zip(&baseline.rounds) {
        if a.demands != b.demands {
            return Err(SimError::Comparison(format!(
                "demand matrices differ at round {}; runs are not paired",
                a.t
            )));
        }
    }

    let candidate_gaps: Vec<f64> = candidate.rounds.iter().map(|r| r.parity_gap()).collect();
    let baseline_gaps: Vec<f64> = baseline.rounds.iter().map(|r| r.parity_gap()).collect();

    let rounds = candidate_gaps.len();
    let mut wins = 0usize;
    let mut zero_baseline_rounds = 0usize;
    let mut best_improvement = 0.0f64;
    let mut sum_abs_candidate = 0.0;
    let mut sum_abs_baseline = 0.0;
    for (&ga, &gb) in candidate_gaps.iter().zip(&baseline_gaps) {
        let (abs_a, abs_b) = (ga.abs(), gb.abs());
        sum_abs_candidate += abs_a;
        sum_abs_baseline += abs_b;
        if abs_a < abs_b {
            wins += 1;
        }
        if abs_b == 0.0 {
            zero_baseline_rounds += 1;
        } else {
            best_improvement = best_improvement.max(1.0 - abs_a / abs_b);
        }
    }
    let mean_improvement = if sum_abs_baseline > 0.0 {
        1.0 - sum_abs_candidate / sum_abs_baseline
    } else {
        0.0
    };

    Ok(ComparisonReport {
        outperform_fraction: wins as f64 / rounds as f64,
        mean_improvement,
        best_improvement,
        zero_baseline_rounds,
        candidate_gaps,
        baseline_gaps,
    })
}
