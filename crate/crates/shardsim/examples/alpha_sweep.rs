//! Sweeps the cardinality exponent α and watches block packing respond.
//! The transition is abrupt: any positive discount breaks the tie between
//! one-shard and two-shard transactions, and the economy reorganizes.

use shardsim::engine::run;
use shardsim::game::TieBreak;
use shardsim::net::{
    BalanceConfig, BalanceMode, GenerationMode, PolicyConfig, PolicyKind, ScenarioConfig,
    TopologyConfig, SCHEMA_VERSION,
};
use shardsim::pricing::PricingParams;

fn main() {
    let base = ScenarioConfig {
        schema_version: SCHEMA_VERSION,
        name: "alpha-sweep".into(),
        seed: 11,
        shards: 4,
        slots: 1000,
        blocks_target: 4,
        amount: 10.0,
        k_max: 2,
        topology: TopologyConfig::Path { agents: 20 },
        pricing: PricingParams { p0: 0.001, p_max: 0.05, alpha: 0.0 },
        policy: PolicyConfig {
            kind: PolicyKind::BestResponse,
            gamma_r: 0.0,
            gamma_s: 0.0,
            tie_break: TieBreak::SeededRandom,
        },
        generation: GenerationMode::RoundShuffle,
        balances: BalanceConfig { mode: BalanceMode::Staggered, amount: 1e6 },
    };

    println!("{:>10} {:>12} {:>10} {:>9}", "alpha", "final eff", "mean |S|", "settled");
    for alpha in [0.0, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 1.0] {
        let mut config = base.clone();
        config.pricing.alpha = alpha;
        let result = run(&config).unwrap();
        let last = result.final_block();
        println!(
            "{:>10} {:>12.4} {:>10.4} {:>9}",
            format!("{alpha}"),
            last.efficiency,
            last.mean_cardinality,
            result.totals.accepted
        );
    }
    println!("\nα = 0 leaves agents indifferent to spreading and efficiency sits");
    println!("near the uniform-mixing value; any positive discount drives pairs");
    println!("into shared shards. Push α far enough and the discount drowns out");
    println!("the congestion term, agents tolerate loaded shards rather than");
    println!("split, and balance gives a little back.");
}
