use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::builder::ArgGroup;
use clap::{Args, Parser, Subcommand, ValueEnum};

use potluck_cli::output::{
    paired_trace_csv, seed_comparison, summary_json, trace_csv, CompareSummary, OscillateSummary,
    RunSummary,
};
use potluck_cli::{load_config, ConfigFileError};
use potluck_core::scenarios::{paired_runs, paper_config, sfbp_config, with_learner};
use potluck_core::{
    compare_runs, detect_oscillation, run_simulation, run_stats, LearnerKind, ScenarioConfig,
};

#[derive(Parser)]
#[command(
    name = "potluck",
    version,
    about = "Deterministic multi-agent simulator for the Potluck Problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its round trace and summary stats
    Run(RunArgs),
    /// Run rational vs weighted-majority learners on the identical demand
    /// stream and report paired comparison statistics
    Compare(CompareArgs),
    /// Run the binary fixed-demand scenario and detect supply oscillation
    Oscillate(OscillateArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Round trace CSV only
    Csv,
    /// Summary JSON only
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory for trace and summary files
    #[arg(long, env = "POTLUCK_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Restrict file output to one format (default: write both)
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("scenario").required(true).args(["preset", "config"])))]
struct RunArgs {
    /// Named preset: paper, paper-rational, or sfbp
    #[arg(long)]
    preset: Option<String>,
    /// Path to a TOML scenario config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the scenario seed
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Named preset to pair up (default: paper)
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Path to a TOML scenario config file; its agents are run once all
    /// rational and once all weighted-majority
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the scenario seed
    #[arg(long)]
    seed: Option<u64>,
    /// Number of consecutive seeds to compare; aggregates (including the
    /// best improvement over seeds) are reported when more than one runs
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OscillateArgs {
    /// Number of agents n
    #[arg(long, default_value_t = 100)]
    agents: usize,
    /// Fixed aggregate demand d, with 0 < d < n
    #[arg(long, default_value_t = 60.0)]
    demand: f64,
    /// Rounds to simulate
    #[arg(long, default_value_t = 100)]
    rounds: usize,
    /// Rounds to skip before scanning for a period
    #[arg(long, default_value_t = 0)]
    transient: usize,
    /// Scenario seed (the trace itself is deterministic)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Oscillate(args) => cmd_oscillate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// Resolve a preset name or config file into a runnable config.
fn resolve_scenario(
    preset: Option<&str>,
    config_path: Option<&Path>,
    seed: Option<u64>,
) -> Result<(String, ScenarioConfig)> {
    if let Some(path) = config_path {
        let mut config = load_config(path).map_err(flatten_config_error)?;
        if let Some(seed) = seed {
            config.seed = seed;
        }
        return Ok((path.display().to_string(), config));
    }
    let name = preset.unwrap_or("paper");
    let seed = seed.unwrap_or(0);
    let config = match name {
        "paper" => paper_config(seed, LearnerKind::WeightedMajority),
        "paper-rational" => paper_config(seed, LearnerKind::Rational),
        "sfbp" => sfbp_config(100, 60.0, 100, seed)?,
        other => bail!("unknown preset `{other}` (expected paper, paper-rational, or sfbp)"),
    };
    Ok((name.to_string(), config))
}

// Keep the one-line diagnostic contract: the source chain is flattened by
// `{err:#}` in main, so just pass the error through anyhow.
fn flatten_config_error(err: ConfigFileError) -> anyhow::Error {
    anyhow::Error::new(err)
}

fn write_artifacts(
    output: &OutputArgs,
    stem: &str,
    csv: Option<&str>,
    json: &str,
) -> Result<()> {
    std::fs::create_dir_all(&output.out_dir)
        .with_context(|| format!("cannot create out dir {}", output.out_dir.display()))?;
    if let Some(csv) = csv {
        if output.format != Some(OutputFormat::Json) {
            let path = output.out_dir.join(format!("{stem}_trace.csv"));
            std::fs::write(&path, csv)
                .with_context(|| format!("cannot write {}", path.display()))?;
            println!("wrote {}", path.display());
        }
    }
    if output.format != Some(OutputFormat::Csv) {
        let path = output.out_dir.join(format!("{stem}_summary.json"));
        std::fs::write(&path, json).with_context(|| format!("cannot write {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_stats(stats: &potluck_core::RunStats) {
    println!("  mean total demand    {:>14.6}", stats.mean_total_demand);
    println!("  mean total supply    {:>14.6}", stats.mean_total_supply);
    println!("  mean |S - D|         {:>14.6}", stats.mean_abs_gap);
    println!("  max |S - D|          {:>14.6}", stats.max_abs_gap);
    println!(
        "  starvation / excess / equilibrium rounds: {} / {} / {}",
        stats.starvation_rounds, stats.excess_rounds, stats.equilibrium_rounds
    );
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let (scenario, config) =
        resolve_scenario(args.preset.as_deref(), args.config.as_deref(), args.seed)?;
    let result = run_simulation(&config)?;
    let stats = run_stats(&result)?;

    println!(
        "run: scenario={scenario} seed={} agents={} rounds={}",
        config.seed, config.n_agents, config.n_rounds
    );
    print_stats(&stats);

    let summary = RunSummary {
        command: "run",
        scenario,
        seed: config.seed,
        n_agents: config.n_agents,
        n_rounds: config.n_rounds,
        config_digest: result.config_digest,
        weight_reset_events: result.weight_resets.len(),
        stats,
    };
    write_artifacts(
        &args.output,
        "run",
        Some(&trace_csv(&result)),
        &summary_json(&summary),
    )
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    if args.seeds < 1 {
        bail!("--seeds must be at least 1");
    }
    let (scenario, base) =
        resolve_scenario(args.preset.as_deref(), args.config.as_deref(), args.seed)?;
    let base_seed = base.seed;

    let mut runs = Vec::with_capacity(args.seeds as usize);
    let mut first_trace: Option<String> = None;
    for offset in 0..args.seeds {
        let mut config = base.clone();
        config.seed = base_seed + offset;
        let pair = paired_runs(
            with_learner(&config, LearnerKind::Rational),
            with_learner(&config, LearnerKind::WeightedMajority),
        )?;
        let report = compare_runs(&pair.weighted_majority, &pair.rational)?;
        if first_trace.is_none() {
            first_trace = Some(paired_trace_csv(&pair.rational, &pair.weighted_majority)?);
        }
        println!(
            "compare: seed={} outperform_fraction={:.4} mean_improvement={:.4} best_improvement={:.4}",
            config.seed, report.outperform_fraction, report.mean_improvement, report.best_improvement
        );
        runs.push(seed_comparison(
            config.seed,
            &report,
            &pair.rational,
            &pair.weighted_majority,
        )?);
    }

    let summary = CompareSummary::build(scenario, base_seed, runs);
    if let Some(aggregate) = &summary.aggregate {
        println!(
            "aggregate over {} seeds: median outperform_fraction={:.4} (min {:.4}), median mean_improvement={:.4}, best improvement over seeds={:.4}",
            summary.seed_count,
            aggregate.median_outperform_fraction,
            aggregate.min_outperform_fraction,
            aggregate.median_mean_improvement,
            aggregate.max_best_improvement
        );
    }
    write_artifacts(
        &args.output,
        "compare",
        first_trace.as_deref(),
        &summary_json(&summary),
    )
}

fn cmd_oscillate(args: OscillateArgs) -> Result<()> {
    let config = sfbp_config(args.agents, args.demand, args.rounds, args.seed)?;
    let result = run_simulation(&config)?;
    let stats = run_stats(&result)?;

    let trace: Vec<f64> = result.rounds.iter().map(|r| r.total_supply).collect();
    let verdict = detect_oscillation(&trace, args.transient)?;
    let min_abs_gap_after_round_1 = result
        .rounds
        .iter()
        .skip(1)
        .map(|r| (r.total_supply - args.demand).abs())
        .fold(f64::INFINITY, f64::min);

    match (verdict.detected, verdict.period) {
        (true, Some(period)) => println!(
            "oscillation detected: period={period} (transient={})",
            verdict.transient_length
        ),
        (false, Some(1)) => println!("no oscillation: the supply trace is constant"),
        _ => println!("no oscillation: the supply trace is aperiodic"),
    }
    println!(
        "min |S - d| after round 1: {min_abs_gap_after_round_1:.6} (d = {:.6})",
        args.demand
    );
    print_stats(&stats);

    let summary = OscillateSummary {
        command: "oscillate",
        n_agents: args.agents,
        fixed_demand: args.demand,
        n_rounds: args.rounds,
        seed: args.seed,
        verdict,
        min_abs_gap_after_round_1,
        stats,
    };
    write_artifacts(
        &args.output,
        "oscillate",
        Some(&trace_csv(&result)),
        &summary_json(&summary),
    )
}
