//! Deterministic serialization of traces and summaries.
//!
//! CSV numbers use fixed six-decimal formatting so identical runs produce
//! byte-identical files regardless of platform or locale.

use std::fmt::Write as _;

use serde::Serialize;

use potluck_core::scenarios::OscillationVerdict;
use potluck_core::{compare_runs, ComparisonReport, RunStats, SimError, SimulationResult};

/// Round trace of a single run: `t,total_demand,total_supply,gap`.
pub fn trace_csv(result: &SimulationResult) -> String {
    let mut out = String::from("t,total_demand,total_supply,gap\n");
    for round in &result.rounds {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6}",
            round.t,
            round.total_demand,
            round.total_supply,
            round.parity_gap()
        )
        .expect("write to string");
    }
    out
}

/// Round trace of a paired comparison, one column group per learner.
/// Errors if the two runs do not share a demand realization.
pub fn paired_trace_csv(
    rational: &SimulationResult,
    weighted: &SimulationResult,
) -> Result<String, SimError> {
    // compare_runs re-checks pairing; reuse it as the gatekeeper.
    compare_runs(weighted, rational)?;
    let mut out = String::from(
        "t,total_demand,supply_rational,gap_rational,supply_weighted_majority,gap_weighted_majority\n",
    );
    for (a, b) in rational.rounds.iter().zip(&weighted.rounds) {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            a.t,
            a.total_demand,
            a.total_supply,
            a.parity_gap(),
            b.total_supply,
            b.parity_gap()
        )
        .expect("write to string");
    }
    Ok(out)
}

/// Serialize any summary as pretty JSON with a trailing newline.
pub fn summary_json<T: Serialize>(summary: &T) -> String {
    let mut out = serde_json::to_string_pretty(summary).expect("summary serializes");
    out.push('\n');
    out
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub command: &'static str,
    pub scenario: String,
    pub seed: u64,
    pub n_agents: usize,
    pub n_rounds: usize,
    pub config_digest: u64,
    pub weight_reset_events: usize,
    pub stats: RunStats,
}

#[derive(Debug, Serialize)]
pub struct OscillateSummary {
    pub command: &'static str,
    pub n_agents: usize,
    pub fixed_demand: f64,
    pub n_rounds: usize,
    pub seed: u64,
    pub verdict: OscillationVerdict,
    /// Smallest |S_t - d| over rounds t >= 1, against the configured fixed
    /// demand.
    pub min_abs_gap_after_round_1: f64,
    pub stats: RunStats,
}

/// How the comparison statistics are defined, embedded in every report.
#[derive(Debug, Serialize)]
pub struct MetricDefinitions {
    pub outperform_fraction: &'static str,
    pub mean_improvement: &'static str,
    pub best_improvement: &'static str,
}

impl Default for MetricDefinitions {
    fn default() -> Self {
        MetricDefinitions {
            outperform_fraction: "share of rounds where the weighted-majority |S-D| is strictly \
                                  smaller than the rational |S-D|, on the identical demand stream",
            mean_improvement: "1 - mean|S-D|_weighted / mean|S-D|_rational over the whole run",
            best_improvement: "largest per-round 1 - |gap_weighted|/|gap_rational|; rounds with \
                               a zero rational gap are excluded and counted separately",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SeedComparison {
    pub seed: u64,
    pub outperform_fraction: f64,
    pub mean_improvement: f64,
    pub best_improvement: f64,
    pub zero_baseline_rounds: usize,
    pub config_digest_rational: u64,
    pub config_digest_weighted_majority: u64,
    pub rational: RunStats,
    pub weighted_majority: RunStats,
}

/// Medians and extremes across seeds; present when more than one seed ran.
#[derive(Debug, Serialize)]
pub struct CompareAggregate {
    pub median_outperform_fraction: f64,
    pub min_outperform_fraction: f64,
    pub median_mean_improvement: f64,
    pub max_best_improvement: f64,
}

#[derive(Debug, Serialize)]
pub struct CompareSummary {
    pub command: &'static str,
    pub scenario: String,
    pub base_seed: u64,
    pub seed_count: u64,
    pub definitions: MetricDefinitions,
    pub runs: Vec<SeedComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregate: Option<CompareAggregate>,
}

impl CompareSummary {
    pub fn build(
        scenario: String,
        base_seed: u64,
        runs: Vec<SeedComparison>,
    ) -> CompareSummary {
        let aggregate = (runs.len() > 1).then(|| CompareAggregate {
            median_outperform_fraction: median(runs.iter().map(|r| r.outperform_fraction)),
            min_outperform_fraction: runs
                .iter()
                .map(|r| r.outperform_fraction)
                .fold(f64::INFINITY, f64::min),
            median_mean_improvement: median(runs.iter().map(|r| r.mean_improvement)),
            max_best_improvement: runs
                .iter()
                .map(|r| r.best_improvement)
                .fold(f64::NEG_INFINITY, f64::max),
        });
        CompareSummary {
            command: "compare",
            scenario,
            base_seed,
            seed_count: runs.len() as u64,
            definitions: MetricDefinitions::default(),
            runs,
            aggregate,
        }
    }
}

/// Median of a nonempty sequence (mean of the middle pair for even counts).
pub fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut values: Vec<f64> = values.collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

pub fn seed_comparison(
    seed: u64,
    report: &ComparisonReport,
    rational: &SimulationResult,
    weighted: &SimulationResult,
) -> Result<SeedComparison, SimError> {
    Ok(SeedComparison {
        seed,
        outperform_fraction: report.outperform_fraction,
        mean_improvement: report.mean_improvement,
        best_improvement: report.best_improvement,
        zero_baseline_rounds: report.zero_baseline_rounds,
        config_digest_rational: rational.config_digest,
        config_digest_weighted_majority: weighted.config_digest,
        rational: potluck_core::run_stats(rational)?,
        weighted_majority: potluck_core::run_stats(weighted)?,
    })
}
