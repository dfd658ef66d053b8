//! Agent-based simulator of a sharded transaction layer where fees price
//! transaction efficiency.
//!
//! The model: agents hold balances spread over `m` shards and pay each other
//! over a fixed request network. A transaction touches a set of shards (the
//! sender's funding shards plus the receiver's deposit shard), and the fewer
//! shards it touches, and the less it piles onto already-loaded shards, the
//! cheaper it is. Fees depend on the pending transaction pool, so every agent's
//! shard choice changes everyone else's prices. That feedback loop forms a
//! potential game per network edge, and repeated best responses drive the
//! system toward cheap, load-balanced, mostly single-shard traffic.
//!
//! The crate is organized bottom-up:
//!
//! * [`ledger`]: transactions, the pending pool, shard usage and loading,
//!   efficiency metrics, and block assembly.
//! * [`pricing`]: the fee function and the expectation matrices that turn
//!   mixed shard strategies into expected fees.
//! * [`game`]: best responses, empirical opponent estimates, the potential
//!   function, and the unilateral-step identity behind convergence.
//! * [`agent`]: what a single agent actually does when asked to receive or
//!   send a payment, including funding feasibility and settlement.
//! * [`net`]: request-network topologies and scenario configuration.
//! * [`engine`]: the three-step simulation loop (request, fulfillment,
//!   assembly), metric traces, and artifact export.
//! * [`cli`]: the `shardsim` binary: `run`, `sweep`, and `verify`.
//!
//! Every run is driven by a single seeded [`rand_chacha::ChaCha12Rng`] stream,
//! so a scenario plus a seed reproduces its transaction trace byte for byte.
//!
//! The `examples/` directory is the guided tour: each example exercises one
//! layer end to end and prints what it computes.

pub mod agent;
pub mod cli;
pub mod engine;
pub mod game;
pub mod ledger;
pub mod net;
pub mod pricing;

/// Errors shared across the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Pool-level metrics are undefined on an empty pool.
    #[error("transaction pool is empty: {0}")]
    EmptyPool(&'static str),

    /// A distribution failed simplex validation (negative mass or sum far
    /// from one).
    #[error("not a probability distribution ({context}): sum = {sum}")]
    NotSimplex { context: &'static str, sum: f64 },

    /// A transaction failed structural validation.
    #[error("invalid transaction: {0}")]
    InvalidTransaction(String),

    /// A scenario or parameter set failed validation.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Settlement asked a shard for more than it holds.
    #[error("settlement overdraw on shard {shard}: need {need}, have {have}")]
    Overdraw { shard: usize, need: f64, have: f64 },

    /// A potential-step check needs exactly one changed strategy.
    #[error("not a unilateral deviation: {0}")]
    NotUnilateral(String),

    /// The simulation stopped making progress (every attempt rejected).
    #[error("no progress after {attempts} consecutive rejected attempts ({blocks} blocks assembled)")]
    Stalled { attempts: u64, blocks: usize },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("scenario parse: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
