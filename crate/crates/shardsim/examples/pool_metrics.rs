//! Builds a small transaction pool by hand and walks through the metrics
//! the simulator tracks: per-shard usage, loading, balance, mean
//! cardinality, and the efficiency that combines them.

use shardsim::ledger::{Block, ShardId, Transaction, TransactionPool};

fn tx(shards: &[usize], m: usize) -> Transaction {
    let mut amounts = vec![0.0; m];
    for (i, &s) in shards.iter().enumerate() {
        // First listed shard receives the payment, the rest are funding
        // markers; any nonzero entry marks membership.
        amounts[s] = if i == 0 { 10.0 } else { 0.01 };
    }
    Transaction::new(0, 1, amounts, 0.0).unwrap()
}

fn report(pool: &TransactionPool) {
    let usage = pool.shard_usage();
    let loading = pool.shard_loading();
    println!("  usage    {usage:.3?}");
    println!("  loading  {loading:.3?}");
    println!("  balance  {:.4}", pool.balance());
    println!("  mean |S| {:.4}", pool.mean_cardinality());
    match pool.efficiency() {
        Ok(e) => println!("  eff      {e:.4}"),
        Err(_) => println!("  eff      (undefined, no transactions)"),
    }
}

fn main() {
    let m = 4;
    let mut pool = TransactionPool::new(m);

    println!("empty pool counts as perfectly balanced:");
    report(&pool);

    println!("\nsingle-shard transactions spread evenly:");
    for s in 0..m {
        pool.push(tx(&[s], m));
        pool.push(tx(&[s], m));
    }
    report(&pool);

    println!("\ntwo cross-shard transactions piling onto shard 0:");
    pool.push(tx(&[0, 1], m));
    pool.push(tx(&[0, 2], m));
    report(&pool);

    let fee = shardsim::pricing::price(
        &[ShardId(0), ShardId(3)],
        &pool,
        &shardsim::pricing::PricingParams { p0: 0.0, p_max: 1.0, alpha: 0.5 },
    )
    .unwrap();
    println!("\na {{0,3}} transaction would pay {fee:.4} right now");

    let block = Block::assemble(0, &mut pool).unwrap();
    println!(
        "\nassembled block {}: {} transactions, efficiency {:.4}; pool drained to {}",
        block.index,
        block.transaction_count(),
        block.efficiency,
        pool.len()
    );
}
