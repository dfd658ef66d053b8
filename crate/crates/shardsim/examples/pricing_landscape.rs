//! Maps out the fee schedule: how the price of a transaction depends on
//! its cardinality, the pool's loading, and the exponent α, and how the
//! same numbers fall out of the expectation matrices.

use shardsim::ledger::{ShardId, Transaction, TransactionPool};
use shardsim::pricing::{expected_price, price, Matrix, PricingParams};

fn main() {
    let m = 4;

    // A pool loaded 30% over even on shard 0, balanced elsewhere.
    let mut pool = TransactionPool::new(m);
    for i in 0..20 {
        let mut amounts = vec![0.0; m];
        amounts[if i < 11 { 0 } else { i % 3 + 1 }] = 1.0;
        pool.push(Transaction::new(0, 1, amounts, 0.0).unwrap());
    }
    let loading = pool.shard_loading();
    println!("pool loading: {loading:.3?}\n");

    println!("fee by shard set and alpha (p0 = 0, p_max = 1):");
    println!("{:>12} {:>8} {:>8} {:>8}", "set", "α=0", "α=0.5", "α=2");
    for set in [vec![1], vec![0], vec![1, 2], vec![0, 1], vec![1, 2, 3]] {
        let shards: Vec<ShardId> = set.iter().map(|&s| ShardId(s)).collect();
        let mut row = format!("{:>12}", format!("{set:?}"));
        for alpha in [0.0, 0.5, 2.0] {
            let params = PricingParams { p0: 0.0, p_max: 1.0, alpha };
            row += &format!(" {:8.4}", price(&shards, &pool, &params).unwrap());
        }
        println!("{row}");
    }
    println!("α = 0 prices only congestion; raising α charges for spread.\n");

    // The same fee through the matrix form: a pure request meeting a pure
    // send on the same shard is a singleton, on different shards a pair.
    let params = PricingParams { p0: 0.0, p_max: 1.0, alpha: 0.5 };
    let p = Matrix::price(&loading, params.alpha);
    let e1 = {
        let mut v = vec![0.0; m];
        v[1] = 1.0;
        v
    };
    let e2 = {
        let mut v = vec![0.0; m];
        v[2] = 1.0;
        v
    };
    println!(
        "matrix check: E[fee] at (e1, e1) = {:.4}, direct {{1}} fee = {:.4}",
        expected_price(&e1, &e1, &p, &params).unwrap(),
        price(&[ShardId(1)], &pool, &params).unwrap()
    );
    println!(
        "              E[fee] at (e1, e2) = {:.4}, direct {{1,2}} fee = {:.4}",
        expected_price(&e1, &e2, &p, &params).unwrap(),
        price(&[ShardId(1), ShardId(2)], &pool, &params).unwrap()
    );

    // Uniform strategies on an idle pool: expected cardinality is 2 - 1/m.
    println!("\nexpected cardinality of uniform request and send strategies:");
    for m in [2usize, 4, 8, 16] {
        let uniform = vec![1.0 / m as f64; m];
        let card = Matrix::expected_cardinality(m).bilinear(&uniform, &uniform);
        println!("  m = {m:>2}: {card:.4} (closed form {:.4})", 2.0 - 1.0 / m as f64);
    }
}
