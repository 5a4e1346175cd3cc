//! End-to-end engine behaviors: determinism, agent-order independence,
//! bound invariants, oracle dominance, and the binary-scenario impossibility.

use potluck_core::engine::{build_agent_states, resolved_prior_demand, step_round, StepParams};
use potluck_core::model::{config_digest, AgentSetup, LearnerKind, ScenarioConfig};
use potluck_core::predictors::PredictorKind;
use potluck_core::scenarios::{paper_config, paired_runs, scenario_sfbp_binary};
use potluck_core::{compare_runs, run_simulation, run_stats, History};

fn small_benchmark_config(seed: u64, learner: LearnerKind) -> ScenarioConfig {
    ScenarioConfig {
        n_agents: 20,
        n_rounds: 60,
        ..paper_config(seed, learner)
    }
}

#[test]
fn replaying_the_config_reproduces_the_result_byte_for_byte() {
    let config = small_benchmark_config(11, LearnerKind::WeightedMajority);
    let a = run_simulation(&config).unwrap();
    let b = run_simulation(&config).unwrap();
    assert_eq!(a.config_digest, config_digest(&config));
    assert_eq!(
        serde_json::to_vec(&a).unwrap(),
        serde_json::to_vec(&b).unwrap()
    );
}

#[test]
fn supplies_and_aggregates_respect_their_bounds() {
    let config = small_benchmark_config(3, LearnerKind::WeightedMajority);
    let result = run_simulation(&config).unwrap();
    let specs = potluck_core::engine::materialize_agent_specs(&config).unwrap();
    let capacity_total: f64 = specs.iter().map(|s| s.max_supply).sum();

    assert_eq!(result.rounds.len(), config.n_rounds);
    for round in &result.rounds {
        for (spec, &supply) in specs.iter().zip(&round.supplies) {
            assert!(supply >= 0.0 && supply <= spec.max_supply);
        }
        assert!(round.total_supply >= 0.0 && round.total_supply <= capacity_total + 1e-9);
        let demand_sum: f64 = round.demands.iter().sum();
        let rel = (round.total_demand - demand_sum).abs() / demand_sum.max(1.0);
        assert!(rel <= 1e-9);
        assert!(round.predictions.iter().all(|p| p.is_finite() && *p >= 0.0));
    }
}

#[test]
fn agent_evaluation_order_does_not_change_the_round() {
    let config = small_benchmark_config(17, LearnerKind::WeightedMajority);
    let mut agents = build_agent_states(&config).unwrap();
    let specs: Vec<_> = agents.iter().map(|a| a.spec.clone()).collect();
    let params = StepParams {
        prior_demand: resolved_prior_demand(&config, &specs),
        supply_rule: config.supply_rule,
    };

    // Warm up a few rounds so ensembles have differentiated weights.
    let mut history = History::new();
    let mut demand_rng = potluck_core::rng::stream_rng(
        config.seed,
        potluck_core::rng::StreamDomain::Demand,
        0,
        0,
    );
    for _ in 0..5 {
        let draw = config
            .demand_process
            .generate(history.len(), config.n_agents, &mut demand_rng);
        let outcome = step_round(&history, &mut agents, &draw, &params).unwrap();
        history.push(outcome.record).unwrap();
    }

    let draw = config
        .demand_process
        .generate(history.len(), config.n_agents, &mut demand_rng);

    // Reverse the agent slice (and the draw to keep per-agent pairing) and
    // un-permute the outputs by agent id afterwards.
    let mut forward = agents.clone();
    let mut reversed: Vec<_> = agents.clone().into_iter().rev().collect();
    let reversed_draw: Vec<f64> = draw.iter().rev().copied().collect();

    let a = step_round(&history, &mut forward, &draw, &params).unwrap().record;
    let b = step_round(&history, &mut reversed, &reversed_draw, &params)
        .unwrap()
        .record;

    let n = config.n_agents;
    for (pos, agent) in reversed.iter().enumerate() {
        let id = agent.spec.id;
        assert_eq!(a.demands[id], b.demands[pos]);
        assert_eq!(a.predictions[id], b.predictions[pos], "agent {id}");
        assert_eq!(a.supplies[id], b.supplies[pos], "agent {id}");
    }
    assert_eq!(n, reversed.len());
    let rel = (a.total_supply - b.total_supply).abs() / a.total_supply.max(1.0);
    assert!(rel <= 1e-9);
}

#[test]
fn oracle_weight_is_nondecreasing_and_ends_on_top() {
    // One weighted-majority agent holding the full stock pool; track the
    // oracle's normalized weight round by round.
    let config = ScenarioConfig {
        n_agents: 1,
        n_rounds: 120,
        seed: 23,
        agents: AgentSetup::Generate {
            learner: LearnerKind::WeightedMajority,
            capacity_range: (1000.0, 1000.0),
            predictor_pool_size: Some(5),
        },
        demand_process: potluck_core::DemandProcess::UniformPerAgent { lo: 0.0, hi: 1000.0, integer: false },
        predictor_pool: potluck_core::stock_predictor_pool(10, 500.0),
        ..ScenarioConfig::default()
    };
    config.validate().unwrap();

    let mut agents = build_agent_states(&config).unwrap();
    let specs: Vec<_> = agents.iter().map(|a| a.spec.clone()).collect();
    let params = StepParams {
        prior_demand: resolved_prior_demand(&config, &specs),
        supply_rule: config.supply_rule,
    };
    let oracle_weight = |agents: &[potluck_core::AgentState]| -> f64 {
        agents[0]
            .final_weights()
            .iter()
            .find(|pw| pw.predictor == PredictorKind::Oracle)
            .expect("oracle in ensemble")
            .weight
    };

    let mut history = History::new();
    let mut demand_rng = potluck_core::rng::stream_rng(
        config.seed,
        potluck_core::rng::StreamDomain::Demand,
        0,
        0,
    );
    let mut previous = oracle_weight(&agents);
    for _ in 0..config.n_rounds {
        let draw = config
            .demand_process
            .generate(history.len(), config.n_agents, &mut demand_rng);
        let outcome = step_round(&history, &mut agents, &draw, &params).unwrap();
        history.push(outcome.record).unwrap();
        let current = oracle_weight(&agents);
        assert!(
            current >= previous - 1e-12,
            "oracle weight decreased: {previous} -> {current}"
        );
        previous = current;
    }

    let finals = agents[0].final_weights();
    let oracle = oracle_weight(&agents);
    for pw in &finals {
        assert!(oracle >= pw.weight, "{:?} outweighs the oracle", pw.predictor);
    }

    // The oracle's output equals the actual demand, so its exponent is 1
    // every round, even when the round's demand is zero.
    for record in history.records() {
        let update = potluck_core::weight_update_factor(
            record.total_demand,
            record.total_demand,
            config.beta,
            config.upsilon_max,
            config.epsilon_floor,
        );
        assert_eq!(update.upsilon, 1.0);
    }
}

#[test]
fn independent_simulations_run_safely_in_parallel() {
    let config = small_benchmark_config(41, LearnerKind::WeightedMajority);
    let reference = run_simulation(&config).unwrap();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let config = config.clone();
            std::thread::spawn(move || run_simulation(&config).unwrap())
        })
        .collect();
    for handle in handles {
        assert_eq!(handle.join().unwrap(), reference);
    }
}

#[test]
fn binary_scenario_never_comes_within_the_impossibility_bound() {
    // All-rational agents with strategy set {0, 1} against fixed demand d:
    // after the first round the parity gap magnitude stays >= min(d, n - d).
    let (n, d) = (100usize, 60.0);
    let result = scenario_sfbp_binary(n, d, 50, 0).unwrap();
    let bound = d.min(n as f64 - d);
    for round in result.rounds.iter().skip(1) {
        assert!(round.total_supply == 0.0 || round.total_supply == n as f64);
        assert!(
            round.parity_gap().abs() >= bound,
            "round {}: gap {}",
            round.t,
            round.parity_gap()
        );
    }
}

#[test]
fn weighted_majority_beats_rational_on_a_paired_run() {
    let pair = paired_runs(
        small_benchmark_config(29, LearnerKind::Rational),
        small_benchmark_config(29, LearnerKind::WeightedMajority),
    )
    .unwrap();
    let report = compare_runs(&pair.weighted_majority, &pair.rational).unwrap();
    let weighted = run_stats(&pair.weighted_majority).unwrap();
    let rational = run_stats(&pair.rational).unwrap();
    assert!(
        weighted.mean_abs_gap < rational.mean_abs_gap,
        "weighted {} vs rational {}",
        weighted.mean_abs_gap,
        rational.mean_abs_gap
    );
    assert!(report.outperform_fraction > 0.5);
}

#[test]
fn weight_resets_never_fire_in_ordinary_runs() {
    let config = small_benchmark_config(31, LearnerKind::WeightedMajority);
    let result = run_simulation(&config).unwrap();
    assert!(result.weight_resets.is_empty());
}
