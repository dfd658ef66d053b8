//! The `shardsim` command line.
//!
//! Three subcommands:
//!
//! * `run` simulates one scenario (a built-in preset or a TOML file) and
//!   writes the metric-trace CSV plus a JSON summary,
//! * `sweep` repeats a scenario over a list of values for one numeric
//!   parameter, across one or more seeds, and tabulates the results,
//! * `verify` exercises the simulator's structural identities (potential
//!   steps, best-response optimality, convergence, metric consistency) and
//!   reports pass/fail per property.
//!
//! Exit codes: 0 on success, 1 when a run or a verify property fails, 2 for
//! usage and configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::engine;
use crate::game::{
    best_response_request, best_response_send, best_response_sweep, potential, EdgeStrategy,
    StrategyProfile, TieBreak,
};
use crate::ledger::{ShardId, Transaction, TransactionPool};
use crate::net::{
    BalanceConfig, BalanceMode, GenerationMode, PolicyConfig, PolicyKind, ScenarioConfig,
    TopologyConfig, SCHEMA_VERSION,
};
use crate::pricing::{expected_price, price, Matrix, PricingParams};

/// Names of the built-in scenarios, in the order `--help` lists them.
pub const PRESET_NAMES: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

/// Returns the frozen built-in scenario with the given name, if any.
///
/// The first three share a 20-agent line network with 4 shards and 2500
/// slots per shard, staggered single-shard endowments, and round-based
/// generation:
///
/// * `fig2`: constant fees, uniform-random shard choices; the throughput
///   baseline.
/// * `fig3`: congestion-only fees (`α = 0`) with best-responding agents;
///   keeps shards balanced but leaves cardinality high.
/// * `fig4`: efficiency pricing (`α = 0.001`) with best-responding agents;
///   converges to balanced single-shard transactions.
///
/// The last two share a 100-agent scale-free network with 8 shards, 12500
/// slots per shard, ample balances in every shard, and uniform edge
/// sampling:
///
/// * `fig5`: constant fees, uniform-random shard choices; the scale-free
///   baseline.
/// * `fig6`: efficiency pricing (`α = 0.00015`) with best-responding
///   agents.
///
/// `fig5` and `fig6` share a seed so they run on the identical generated
/// network and are directly comparable.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    let line_20x4 = |name: &str, seed, policy, pricing| ScenarioConfig {
        schema_version: SCHEMA_VERSION,
        name: name.to_string(),
        seed,
        shards: 4,
        slots: 2500,
        blocks_target: 5,
        amount: 10.0,
        k_max: 2,
        topology: TopologyConfig::Path { agents: 20 },
        pricing,
        policy,
        generation: GenerationMode::RoundShuffle,
        balances: BalanceConfig { mode: BalanceMode::Staggered, amount: 1e6 },
    };
    let scale_free_100x8 = |name: &str, policy, pricing| ScenarioConfig {
        schema_version: SCHEMA_VERSION,
        name: name.to_string(),
        seed: 56,
        shards: 8,
        slots: 12500,
        blocks_target: 5,
        amount: 10.0,
        k_max: 2,
        topology: TopologyConfig::PreferentialAttachment { agents: 100, attach_k: 3 },
        pricing,
        policy,
        generation: GenerationMode::UniformEdge,
        balances: BalanceConfig { mode: BalanceMode::Uniform, amount: 1e6 },
    };
    let random = PolicyConfig {
        kind: PolicyKind::Random,
        gamma_r: 0.0,
        gamma_s: 0.0,
        tie_break: TieBreak::SeededRandom,
    };
    let best_response = PolicyConfig {
        kind: PolicyKind::BestResponse,
        gamma_r: 0.0,
        gamma_s: 0.0,
        tie_break: TieBreak::SeededRandom,
    };
    let constant_fee = PricingParams { p0: 0.0, p_max: 0.0, alpha: 0.0 };
    let efficiency_fee = |alpha| PricingParams { p0: 0.0, p_max: 1.0, alpha };
    match name {
        "fig2" => Some(line_20x4("fig2", 2, random, constant_fee)),
        "fig3" => Some(line_20x4("fig3", 3, best_response, efficiency_fee(0.0))),
        "fig4" => Some(line_20x4("fig4", 4, best_response, efficiency_fee(0.001))),
        "fig5" => Some(scale_free_100x8("fig5", random, constant_fee)),
        "fig6" => Some(scale_free_100x8("fig6", best_response, efficiency_fee(0.00015))),
        _ => None,
    }
}

#[derive(Parser)]
#[command(
    name = "shardsim",
    version,
    about = "Agent-based simulator of a sharded transaction layer with efficiency-based fees"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its artifacts.
    Run(RunArgs),
    /// Rerun a scenario over a list of values for one parameter.
    Sweep(SweepArgs),
    /// Check the simulator's structural identities.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ScenarioSource {
    /// Built-in scenario: fig2, fig3, fig4, fig5, or fig6.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Scenario TOML file.
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Override the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, env = "SHARDSIM_OUT", default_value = ".")]
    out: PathBuf,
    /// Artifacts to write.
    #[arg(long, value_delimiter = ',', default_values = ["csv", "json"])]
    format: Vec<ArtifactFormat>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Numeric scenario parameter to vary: alpha, p0, p-max, amount,
    /// slots, blocks-target, k-max, shards, gamma-r, or gamma-s.
    #[arg(long, value_name = "NAME")]
    param: String,
    /// Comma-separated values for the parameter.
    #[arg(long, value_delimiter = ',', required = true, value_name = "LIST")]
    values: Vec<f64>,
    /// Comma-separated seeds; defaults to the scenario's own seed.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    seeds: Vec<u64>,
    /// Output directory for the sweep table.
    #[arg(long, env = "SHARDSIM_OUT", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Corrupts a price-matrix entry inside the potential-step check to
    /// prove the check can fail.
    #[arg(long, hide = true)]
    fault_inject: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArtifactFormat {
    Csv,
    Json,
}

/// A command failure carrying its intended process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses the process arguments and dispatches. The binary's whole main.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}

fn load_scenario(source: &ScenarioSource) -> std::result::Result<ScenarioConfig, Failure> {
    if let Some(name) = &source.preset {
        preset(name).ok_or_else(|| {
            Failure::usage(format!(
                "unknown preset '{name}'; available presets: {}",
                PRESET_NAMES.join(", ")
            ))
        })
    } else {
        let path = source.scenario.as_ref().expect("clap enforces the group");
        ScenarioConfig::from_path(path)
            .map_err(|e| Failure::usage(format!("cannot load scenario {}: {e}", path.display())))
    }
}

fn artifact_stem(config: &ScenarioConfig) -> String {
    let base = if config.name.is_empty() { "scenario" } else { config.name.as_str() };
    format!("{base}-seed{}", config.seed)
}

fn cmd_run(args: &RunArgs) -> CmdResult {
    let mut config = load_scenario(&args.source)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let result = engine::run(&config)
        .map_err(|e| Failure::runtime(format!("run failed: {e}")))?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| Failure::runtime(format!("cannot create {}: {e}", args.out.display())))?;
    let stem = artifact_stem(&config);
    let mut written = Vec::new();
    if args.format.contains(&ArtifactFormat::Csv) {
        let path = args.out.join(format!("{stem}.trace.csv"));
        let file = std::fs::File::create(&path)
            .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))?;
        result
            .write_trace_csv(std::io::BufWriter::new(file))
            .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    if args.format.contains(&ArtifactFormat::Json) {
        let path = args.out.join(format!("{stem}.summary.json"));
        let file = std::fs::File::create(&path)
            .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))?;
        result
            .write_summary_json(std::io::BufWriter::new(file))
            .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }

    let files: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    println!(
        "{} seed {}: {} network, {} agents, {} edges; {} blocks, {} transactions, \
         final efficiency {:.4}; wrote {}",
        config.name,
        config.seed,
        config.topology.kind_name(),
        config.topology.agents(),
        result.edge_count,
        result.blocks.len(),
        result.total_transactions(),
        result.totals.final_efficiency,
        files.join(", "),
    );
    Ok(())
}

/// Sets one numeric scenario field by CLI name. Integer-valued fields
/// reject fractional inputs instead of rounding silently.
fn apply_param(config: &mut ScenarioConfig, param: &str, value: f64) -> std::result::Result<(), Failure> {
    let as_count = |value: f64, what: &str| -> std::result::Result<usize, Failure> {
        if value.fract() != 0.0 || value < 0.0 || value > usize::MAX as f64 {
            return Err(Failure::usage(format!("{what} needs a non-negative integer, got {value}")));
        }
        Ok(value as usize)
    };
    match param {
        "alpha" => config.pricing.alpha = value,
        "p0" => config.pricing.p0 = value,
        "p-max" => config.pricing.p_max = value,
        "amount" => config.amount = value,
        "gamma-r" => config.policy.gamma_r = value,
        "gamma-s" => config.policy.gamma_s = value,
        "slots" => config.slots = as_count(value, "slots")?,
        "blocks-target" => config.blocks_target = as_count(value, "blocks-target")?,
        "k-max" => config.k_max = as_count(value, "k-max")?,
        "shards" => config.shards = as_count(value, "shards")?,
        other => {
            return Err(Failure::usage(format!(
                "unknown sweep parameter '{other}'; supported: alpha, p0, p-max, amount, \
                 slots, blocks-target, k-max, shards, gamma-r, gamma-s"
            )))
        }
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    let base = load_scenario(&args.source)?;
    let seeds = if args.seeds.is_empty() { vec![base.seed] } else { args.seeds.clone() };

    // Validate every configuration up front so bad input fails before any
    // simulation starts.
    let mut jobs: Vec<(f64, u64, ScenarioConfig)> = Vec::new();
    for &value in &args.values {
        for &seed in &seeds {
            let mut config = base.clone();
            apply_param(&mut config, &args.param, value)?;
            config.seed = seed;
            config
                .validate()
                .map_err(|e| Failure::usage(format!("{}={value}: {e}", args.param)))?;
            jobs.push((value, seed, config));
        }
    }

    let results: Vec<std::result::Result<(f64, u64, f64, u64), String>> = jobs
        .par_iter()
        .map(|(value, seed, config)| {
            engine::run(config)
                .map(|r| (*value, *seed, r.totals.final_efficiency, r.total_transactions()))
                .map_err(|e| format!("{}={value} seed {seed}: {e}", args.param))
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    for result in results {
        rows.push(result.map_err(Failure::runtime)?);
    }

    println!("{:>12} {:>12} {:>18} {:>20}", args.param, "seed", "final_efficiency", "total_transactions");
    for (value, seed, efficiency, transactions) in &rows {
        println!("{value:>12} {seed:>12} {efficiency:>18.6} {transactions:>20}");
    }

    std::fs::create_dir_all(&args.out)
        .map_err(|e| Failure::runtime(format!("cannot create {}: {e}", args.out.display())))?;
    let stem = if base.name.is_empty() { "scenario".to_string() } else { base.name.clone() };
    let path = args.out.join(format!("{stem}-sweep-{}.csv", args.param));
    let write = || -> crate::Result<()> {
        let mut csv = csv::Writer::from_path(&path)?;
        csv.write_record(["value", "seed", "final_efficiency", "total_transactions"])?;
        for (value, seed, efficiency, transactions) in &rows {
            csv.write_record([
                value.to_string(),
                seed.to_string(),
                efficiency.to_string(),
                transactions.to_string(),
            ])?;
        }
        csv.flush()?;
        Ok(())
    };
    write().map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let suites: [(&str, std::result::Result<String, String>); 4] = [
        ("potential step identity", suite_potential_identity(args.fault_inject)),
        ("best-response vertex optimality", suite_vertex_optimality()),
        ("monotone best-response convergence", suite_monotone_convergence()),
        ("pricing and metric consistency", suite_pricing_consistency()),
    ];
    let mut ok = true;
    for (name, outcome) in suites {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                ok = false;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure { code: 1, message: String::new() })
    }
}

/// Uniform sample from the probability simplex on `m` points.
fn simplex<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..m).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

/// A feasible random loading vector: the positive excess over `1/m` of a
/// random usage distribution.
fn random_loading<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    simplex(m, rng).into_iter().map(|u| (u - 1.0 / m as f64).max(0.0)).collect()
}

fn random_profile<R: Rng + ?Sized>(edges: usize, m: usize, rng: &mut R) -> StrategyProfile {
    StrategyProfile::new(
        (0..edges)
            .map(|_| EdgeStrategy::new(simplex(m, rng), simplex(m, rng)).expect("simplex input"))
            .collect(),
    )
}

/// Changing one side of one edge moves the aggregate potential by exactly
/// that edge's utility change. Exercised over random matrices, profiles,
/// and unilateral deviations; `fault` corrupts the matrix used on the
/// utility side, which must break the identity.
fn suite_potential_identity(fault: bool) -> std::result::Result<String, String> {
    let mut rng = ChaCha12Rng::seed_from_u64(0xC0FFEE);
    let trials = 20_000;
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let m = rng.gen_range(2..=8);
        let edges = rng.gen_range(1..=12);
        let alpha = rng.gen_range(0.0..2.0);
        let p = Matrix::price(&random_loading(m, &mut rng), alpha);
        let p_utility = if fault {
            let mut entries = p.entries().to_vec();
            entries[0] = -entries[0];
            Matrix::from_entries(m, entries)
        } else {
            p.clone()
        };

        let before = random_profile(edges, m, &mut rng);
        let mut after = before.clone();
        let edge = rng.gen_range(0..edges);
        // Deviate toward a vertex with positive mass on shard 0 so a
        // corrupted (0,0) entry always shows up in the utility.
        let mut w = vec![0.0; m];
        w[0] = 0.7;
        w[rng.gen_range(0..m)] += 0.3;
        if rng.gen_bool(0.5) {
            after.edge_mut(edge).set_request(w).expect("simplex input");
        } else {
            after.edge_mut(edge).set_send(w).expect("simplex input");
        }

        let delta_potential = potential(&after, &p) - potential(&before, &p);
        let delta_utility =
            after.edge(edge).utility(&p_utility) - before.edge(edge).utility(&p_utility);
        let gap = (delta_potential - delta_utility).abs();
        worst = worst.max(gap);
        if gap > 1e-12 {
            return Err(format!(
                "trial {trial}: |ΔH − Δu| = {gap:.3e} (m={m}, edges={edges}, α={alpha:.3})"
            ));
        }
    }
    Ok(format!("{trials} unilateral deviations, worst |ΔH − Δu| = {worst:.3e}"))
}

/// No mixed strategy beats the pure best response against a fixed
/// counterparty estimate, on either side of an edge.
fn suite_vertex_optimality() -> std::result::Result<String, String> {
    let mut rng = ChaCha12Rng::seed_from_u64(0xBEEF);
    let instances = 2_000;
    let mixed_per_instance = 300;
    for instance in 0..instances {
        let m = rng.gen_range(2..=8);
        let alpha = rng.gen_range(0.0..2.0);
        let p = Matrix::price(&random_loading(m, &mut rng), alpha);

        let v_hat = simplex(m, &mut rng);
        let s = best_response_request(&p, &v_hat);
        let mut unit = vec![0.0; m];
        unit[s.index()] = 1.0;
        let best = p.bilinear(&unit, &v_hat);

        let w_hat = simplex(m, &mut rng);
        let t = best_response_send(&p, &w_hat);
        let mut unit_t = vec![0.0; m];
        unit_t[t.index()] = 1.0;
        let best_send = p.bilinear(&w_hat, &unit_t);

        for _ in 0..mixed_per_instance {
            let w = simplex(m, &mut rng);
            let value = p.bilinear(&w, &v_hat);
            if value > best + 1e-12 {
                return Err(format!(
                    "instance {instance}: mixed request strategy beats the pure response \
                     by {:.3e}",
                    value - best
                ));
            }
            let v = simplex(m, &mut rng);
            let value = p.bilinear(&w_hat, &v);
            if value > best_send + 1e-12 {
                return Err(format!(
                    "instance {instance}: mixed send strategy beats the pure response \
                     by {:.3e}",
                    value - best_send
                ));
            }
        }
    }
    Ok(format!("{instances} instances × {mixed_per_instance} mixed strategies per side"))
}

/// With the price matrix frozen, repeated best-response sweeps never lower
/// the potential and reach a fixed point quickly.
fn suite_monotone_convergence() -> std::result::Result<String, String> {
    let mut rng = ChaCha12Rng::seed_from_u64(0xFACADE);
    let trials = 100;
    let sweep_budget = 10;
    let mut worst_sweeps = 0;
    for trial in 0..trials {
        let m = rng.gen_range(1..=8);
        let edges = rng.gen_range(1..=50);
        let alpha = rng.gen_range(0.0..2.0);
        let p = Matrix::price(&random_loading(m, &mut rng), alpha);
        let mut profile = random_profile(edges, m, &mut rng);
        let mut h = potential(&profile, &p);
        let mut converged = false;
        for sweep in 1..=sweep_budget {
            let switches = best_response_sweep(&mut profile, &p);
            let h_next = potential(&profile, &p);
            if h_next < h - 1e-12 {
                return Err(format!(
                    "trial {trial}: potential dropped {:.3e} on sweep {sweep}",
                    h - h_next
                ));
            }
            h = h_next;
            if switches == 0 {
                worst_sweeps = worst_sweeps.max(sweep);
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(format!("trial {trial}: no fixed point within {sweep_budget} sweeps"));
        }
    }
    Ok(format!("{trials}/{trials} trials converged, slowest in {worst_sweeps} sweeps"))
}

/// Incrementally maintained pool metrics match brute-force recomputation,
/// the uniform-strategy expected cardinality matches its closed form, and
/// the bilinear expected fee agrees with direct set pricing at vertices.
fn suite_pricing_consistency() -> std::result::Result<String, String> {
    let mut rng = ChaCha12Rng::seed_from_u64(0xD1CE);
    let pools = 2_000;
    for trial in 0..pools {
        let m = rng.gen_range(1..=8);
        let mut pool = TransactionPool::new(m);
        for _ in 0..rng.gen_range(0..60) {
            let mut amounts = vec![0.0; m];
            amounts[rng.gen_range(0..m)] += rng.gen_range(0.1..10.0);
            if m > 1 && rng.gen_bool(0.5) {
                amounts[rng.gen_range(0..m)] += rng.gen_range(0.1..10.0);
            }
            pool.push(Transaction::new(0, 1, amounts, 0.0).expect("valid amounts"));
        }

        let mut counts = vec![0usize; m];
        let mut usages = 0usize;
        for tx in pool.transactions() {
            for s in tx.shard_set() {
                counts[s.index()] += 1;
                usages += 1;
            }
        }
        if counts != pool.per_shard_counts() || usages != pool.total_usages() {
            return Err(format!("trial {trial}: incremental counts diverged"));
        }
        let usage = pool.shard_usage();
        for s in 0..m {
            let want = if usages == 0 { 0.0 } else { counts[s] as f64 / usages as f64 };
            if (usage[s] - want).abs() > 1e-12 {
                return Err(format!("trial {trial}: usage[{s}] off by {:.3e}", usage[s] - want));
            }
        }
        let balance = 1.0 - pool.shard_loading().iter().sum::<f64>();
        if (pool.balance() - balance).abs() > 1e-12 {
            return Err(format!("trial {trial}: balance mismatch"));
        }
        if !pool.is_empty() {
            let card = usages as f64 / pool.len() as f64;
            if (pool.mean_cardinality() - card).abs() > 1e-12 {
                return Err(format!("trial {trial}: mean cardinality mismatch"));
            }
            let eff = pool.efficiency().expect("non-empty pool");
            if (eff - balance / card).abs() > 1e-12 {
                return Err(format!("trial {trial}: efficiency mismatch"));
            }
        }

        // Bilinear expected fee at a vertex pair = direct fee of that set.
        let params = PricingParams { p0: 0.1, p_max: 1.0, alpha: rng.gen_range(0.0..2.0) };
        let matrix = Matrix::price(&pool.shard_loading(), params.alpha);
        let (s, t) = (rng.gen_range(0..m), rng.gen_range(0..m));
        let mut w = vec![0.0; m];
        let mut v = vec![0.0; m];
        w[s] = 1.0;
        v[t] = 1.0;
        let via_matrix = expected_price(&w, &v, &matrix, &params).expect("simplex vertices");
        let mut set = vec![ShardId(s), ShardId(t)];
        set.sort_unstable();
        set.dedup();
        let direct = price(&set, &pool, &params).expect("valid set");
        if (via_matrix - direct).abs() > 1e-12 {
            return Err(format!(
                "trial {trial}: vertex fee {via_matrix} vs direct fee {direct}"
            ));
        }
    }

    for m in 1..=16 {
        let uniform = vec![1.0 / m as f64; m];
        let expected = Matrix::expected_cardinality(m).bilinear(&uniform, &uniform);
        let closed_form = 2.0 - 1.0 / m as f64;
        if (expected - closed_form).abs() > 1e-12 {
            return Err(format!("m={m}: uniform expected cardinality {expected} ≠ {closed_form}"));
        }
    }
    Ok(format!("{pools} random pools; uniform cardinality closed form up to m=16"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_in_scenario_files_match_the_builtin_presets() {
        let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../scenarios");
        for name in PRESET_NAMES {
            let path = root.join(format!("{name}.toml"));
            let from_file = ScenarioConfig::from_path(&path)
                .unwrap_or_else(|e| panic!("loading {}: {e}", path.display()));
            assert_eq!(from_file, preset(name).unwrap(), "{name}.toml drifted from the preset");
        }
    }

    #[test]
    fn exploratory_scenario_files_load_and_validate() {
        let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../scenarios");
        for entry in std::fs::read_dir(&root).expect("scenarios directory") {
            let path = entry.unwrap().path();
            if path.extension().and_then(|e| e.to_str()) != Some("toml") {
                continue;
            }
            let config = ScenarioConfig::from_path(&path)
                .unwrap_or_else(|e| panic!("loading {}: {e}", path.display()));
            config.validate().unwrap_or_else(|e| panic!("{} invalid: {e}", path.display()));
            assert_eq!(
                format!("{}.toml", config.name),
                path.file_name().unwrap().to_str().unwrap(),
                "scenario name should match its file name"
            );
        }
    }

    #[test]
    fn presets_resolve_and_validate() {
        for name in PRESET_NAMES {
            let config = preset(name).expect("known preset");
            assert_eq!(config.name, name);
            config.validate().expect("preset validates");
        }
        assert!(preset("fig7").is_none());
    }

    #[test]
    fn baseline_and_pricing_presets_share_their_network() {
        let fig5 = preset("fig5").unwrap();
        let fig6 = preset("fig6").unwrap();
        assert_eq!(fig5.seed, fig6.seed);
        assert_eq!(fig5.topology, fig6.topology);
        assert_eq!(
            fig5.build_network().unwrap().edges(),
            fig6.build_network().unwrap().edges()
        );
    }

    #[test]
    fn verify_suites_pass_clean() {
        assert!(suite_potential_identity(false).is_ok());
        assert!(suite_vertex_optimality().is_ok());
        assert!(suite_monotone_convergence().is_ok());
        assert!(suite_pricing_consistency().is_ok());
    }

    #[test]
    fn injected_fault_breaks_the_potential_identity() {
        let outcome = suite_potential_identity(true);
        assert!(outcome.is_err(), "fault injection must be detected");
    }

    #[test]
    fn sweep_parameters_apply_to_the_right_fields() {
        let mut config = preset("fig3").unwrap();
        apply_param(&mut config, "alpha", 0.25).map_err(|f| f.message).unwrap();
        assert_eq!(config.pricing.alpha, 0.25);
        apply_param(&mut config, "slots", 100.0).map_err(|f| f.message).unwrap();
        assert_eq!(config.slots, 100);
        assert!(apply_param(&mut config, "slots", 99.5).is_err());
        assert!(apply_param(&mut config, "bogus", 1.0).is_err());
    }
}
