//! Shows the game structure behind the simulator: every unilateral
//! strategy change moves the shared potential by exactly the mover's own
//! utility change, so asynchronous best responses walk uphill on one
//! function and stop at a Nash equilibrium.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use shardsim::game::{
    best_response_request, best_response_sweep, potential, verify_potential_step, EdgeStrategy,
    StrategyProfile,
};
use shardsim::pricing::Matrix;

fn random_mixed(m: usize, rng: &mut ChaCha12Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() + 0.05).collect();
    let sum: f64 = x.iter().sum();
    x.iter_mut().for_each(|p| *p /= sum);
    x
}

fn argmax(x: &[f64]) -> usize {
    (0..x.len()).max_by(|&a, &b| x[a].total_cmp(&x[b])).unwrap()
}

fn main() {
    let m = 3;
    let p = Matrix::price(&[0.30, 0.05, 0.0], 0.5);
    let mut rng = ChaCha12Rng::seed_from_u64(9);

    // Six directed edges, each starting from an arbitrary mixed strategy
    // pair. Utility is the discount weight wᵀPv, so higher means cheaper.
    let edges = (0..6)
        .map(|_| EdgeStrategy::new(random_mixed(m, &mut rng), random_mixed(m, &mut rng)).unwrap())
        .collect();
    let mut profile = StrategyProfile::new(edges);
    println!("starting potential H = {:.6}", potential(&profile, &p));

    // One edge deviates alone: its request side jumps to the pure best
    // response. The potential moves by exactly its utility change.
    let before = profile.clone();
    let e = 2;
    let target = best_response_request(&p, before.edge(e).send());
    let mut w = vec![0.0; m];
    w[target.0] = 1.0;
    profile.edge_mut(e).set_request(w).unwrap();
    let delta = verify_potential_step(&before, &profile, &p).unwrap();
    println!(
        "edge {e} requests on shard {} alone: Δu = {:+.6}, ΔH = {:+.6} (gap {:.1e})",
        target.0,
        delta.delta_edge_utility,
        delta.delta_potential,
        (delta.delta_potential - delta.delta_edge_utility).abs()
    );

    // Round-robin best responses. Each sweep only takes strict
    // improvements, so H climbs until nobody can move: a Nash profile.
    let mut sweep = 0;
    loop {
        sweep += 1;
        let changed = best_response_sweep(&mut profile, &p);
        println!("sweep {sweep}: {changed} strategies changed, H = {:.6}", potential(&profile, &p));
        if changed == 0 {
            break;
        }
    }

    println!("\nequilibrium reached; per-edge (request, send) shards:");
    for (i, edge) in profile.edges().iter().enumerate() {
        println!(
            "  edge {i}: ({}, {})  utility {:.4}",
            argmax(edge.request()),
            argmax(edge.send()),
            edge.utility(&p)
        );
    }
}
