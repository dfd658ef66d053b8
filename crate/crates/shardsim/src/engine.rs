//! The simulation loop: attempt-by-attempt transaction processing, block
//! lifecycle, metric tracing, and artifact export.
//!
//! Each attempt runs the three-step transaction process on one network
//! edge:
//!
//! 1. request: the receiver picks the deposit shard,
//! 2. fulfillment: the sender picks a feasible funding set and settles, or
//!    rejects for lack of funds,
//! 3. assembly: once any shard's pending count reaches the per-shard slot
//!    capacity, the pool is cut into a block and reset.
//!
//! Edges are scheduled either in shuffled whole-network rounds or by
//! uniform draws, per config. One [`MetricSample`] is recorded per attempt,
//! carrying the live pool metrics; the trace is the simulator's primary
//! data product and is exported as CSV alongside a JSON run summary.
//!
//! Every random choice in a run (scheduling, tie-breaks, random-policy
//! draws) comes from one seeded ChaCha stream consumed in a fixed order,
//! so a config plus seed pins the whole trace byte for byte.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::agent::{
    choose_request_shard, choose_send_shards, feasible_shard_sets, settle, AgentState,
    FulfillmentResult,
};
use crate::game::{break_tie, TieBreak};
use crate::ledger::{AgentId, Block, ShardId, TransactionPool};
use crate::net::{GenerationMode, Network, PolicyKind, ScenarioConfig};
use crate::{Error, Result};

/// Pool metrics at one transaction attempt, recorded after the attempt
/// touched (or failed to touch) the pool.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSample {
    /// Attempt counter, counting rejected attempts too.
    pub tx_index: u64,
    /// Per-shard usage fractions of the pending pool.
    pub usage: Vec<f64>,
    /// Total loading `Σ_s λ_s`.
    pub loading_sum: f64,
    /// Mean cardinality of the pending pool (0 when empty).
    pub mean_cardinality: f64,
    /// Fee paid; 0 for rejected attempts.
    pub fee: f64,
    pub accepted: bool,
    /// The block this attempt belongs to.
    pub block_index: u64,
    /// True on the attempt whose transaction filled a shard and cut the
    /// block.
    pub block_boundary: bool,
    /// How unevenly the network's learned request behavior spreads over
    /// shards: the loading-style excess `Σ_s max(0, q̄_s − 1/m)` of the
    /// edge-averaged request histogram `q̄`. Zero while estimates are
    /// uniform; grows only if edges collectively pile onto the same shards.
    pub request_spread: f64,
}

/// Whole-run accounting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTotals {
    pub attempts: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub fees_burned: f64,
    /// Efficiency of the last assembled block.
    pub final_efficiency: f64,
}

/// Everything a finished run produced.
#[derive(Debug)]
pub struct RunResult {
    pub config: ScenarioConfig,
    pub edge_count: usize,
    pub blocks: Vec<Block>,
    pub trace: Vec<MetricSample>,
    pub totals: RunTotals,
}

impl RunResult {
    /// Writes the per-attempt metric trace as CSV: `tx_index`,
    /// `shard_usage_0..m−1`, `loading_sum`, `mean_cardinality`, `fee`,
    /// `accepted` (1/0), `block_index`, `request_spread`.
    pub fn write_trace_csv(&self, writer: impl std::io::Write) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        let m = self.config.shards;
        let mut header: Vec<String> = vec!["tx_index".into()];
        header.extend((0..m).map(|s| format!("shard_usage_{s}")));
        header.extend(
            ["loading_sum", "mean_cardinality", "fee", "accepted", "block_index", "request_spread"]
                .map(String::from),
        );
        csv.write_record(&header)?;
        let mut record: Vec<String> = Vec::with_capacity(header.len());
        for sample in &self.trace {
            record.clear();
            record.push(sample.tx_index.to_string());
            record.extend(sample.usage.iter().map(|u| u.to_string()));
            record.push(sample.loading_sum.to_string());
            record.push(sample.mean_cardinality.to_string());
            record.push(sample.fee.to_string());
            record.push(if sample.accepted { "1".into() } else { "0".into() });
            record.push(sample.block_index.to_string());
            record.push(sample.request_spread.to_string());
            csv.write_record(&record)?;
        }
        csv.flush()?;
        Ok(())
    }

    /// The trace CSV as one in-memory string.
    pub fn trace_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_trace_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv is utf-8"))
    }

    /// Self-describing JSON summary: config echo, seed, network shape,
    /// per-block metrics, and totals.
    pub fn summary_json(&self) -> serde_json::Value {
        let blocks: Vec<serde_json::Value> = self
            .blocks
            .iter()
            .map(|b| {
                serde_json::json!({
                    "index": b.index,
                    "transactions": b.transaction_count(),
                    "efficiency": b.efficiency,
                    "mean_cardinality": b.mean_cardinality,
                    "balance": b.balance,
                })
            })
            .collect();
        serde_json::json!({
            "code_version": env!("CARGO_PKG_VERSION"),
            "seed": self.config.seed,
            "scenario": self.config,
            "network": {
                "kind": self.config.topology.kind_name(),
                "agents": self.config.topology.agents(),
                "edges": self.edge_count,
            },
            "blocks": blocks,
            "totals": self.totals,
        })
    }

    pub fn write_summary_json(&self, writer: impl std::io::Write) -> Result<()> {
        serde_json::to_writer_pretty(writer, &self.summary_json())?;
        Ok(())
    }

    pub fn total_transactions(&self) -> u64 {
        self.totals.accepted
    }

    pub fn final_block(&self) -> &Block {
        self.blocks.last().expect("a finished run has blocks")
    }
}

/// A run in progress. [`run`] drives it to completion; tests can drive it
/// step by step and inspect the live state between attempts.
pub struct SimState {
    config: ScenarioConfig,
    network: Network,
    agents: Vec<AgentState>,
    pool: TransactionPool,
    blocks: Vec<Block>,
    trace: Vec<MetricSample>,
    rng: ChaCha12Rng,
    round: Vec<usize>,
    round_next: usize,
    attempts: u64,
    attempts_since_block: u64,
    fees_burned: f64,
    /// Sum over edges of each edge's normalized request histogram,
    /// maintained incrementally and resynced at block cuts.
    request_mix_sum: Vec<f64>,
    /// Per edge, the deposit shard and withdrawal shard of its last settled
    /// transaction. Sticky tie-breaking reads these as inertia anchors.
    edge_memory: Vec<(Option<ShardId>, Option<ShardId>)>,
    scratch: Vec<f64>,
}

impl SimState {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let network = config.build_network()?;
        let m = config.shards;
        let balances = config.initial_balances().into_rows();
        let mut agents: Vec<AgentState> = balances
            .into_iter()
            .enumerate()
            .map(|(id, balances)| {
                let mut agent =
                    AgentState::new(id, m, config.policy.gamma_r, config.policy.gamma_s);
                agent.balances = balances;
                agent
            })
            .collect();
        for id in 0..network.agents() {
            let senders = network.requests_from(id).to_vec();
            let receivers = network.requested_by(id).to_vec();
            agents[id].register_neighbors(&senders, &receivers);
        }
        let rng = ChaCha12Rng::seed_from_u64(config.seed);
        let edge_count = network.edge_count();
        Ok(Self {
            pool: TransactionPool::new(m),
            blocks: Vec::new(),
            trace: Vec::new(),
            rng,
            round: (0..edge_count).collect(),
            round_next: edge_count,
            attempts: 0,
            attempts_since_block: 0,
            fees_burned: 0.0,
            request_mix_sum: vec![edge_count as f64 / m as f64; m],
            edge_memory: vec![(None, None); edge_count],
            scratch: Vec::new(),
            config,
            network,
            agents,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn pool(&self) -> &TransactionPool {
        &self.pool
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn trace(&self) -> &[MetricSample] {
        &self.trace
    }

    pub fn is_done(&self) -> bool {
        self.blocks.len() >= self.config.blocks_target
    }

    fn next_edge(&mut self) -> usize {
        match self.config.generation {
            GenerationMode::RoundShuffle => {
                if self.round_next >= self.round.len() {
                    self.round.shuffle(&mut self.rng);
                    self.round_next = 0;
                }
                let e = self.round[self.round_next];
                self.round_next += 1;
                e
            }
            GenerationMode::UniformEdge => self.rng.gen_range(0..self.network.edge_count()),
        }
    }

    /// One transaction attempt end to end. Returns the recorded sample.
    pub fn step(&mut self) -> Result<&MetricSample> {
        let edge = self.next_edge();
        let (receiver_id, sender_id) = self.network.edges()[edge];
        let params = self.config.pricing;
        let tie = self.config.policy.tie_break;
        let sticky = tie == TieBreak::StickyRandom;
        let m = self.config.shards;

        // Step 1: the receiver picks the deposit shard.
        let deposit = match self.config.policy.kind {
            PolicyKind::Random => ShardId(self.rng.gen_range(0..m)),
            PolicyKind::FixedPrice => {
                // Constant prices tie every shard; only the tie-break acts.
                let all: Vec<usize> = (0..m).collect();
                ShardId(break_tie(&all, tie, &mut self.rng))
            }
            PolicyKind::BestResponse => choose_request_shard(
                &self.agents[receiver_id],
                sender_id,
                &self.pool,
                &params,
                tie,
                if sticky { self.edge_memory[edge].0 } else { None },
                &mut self.rng,
            ),
        };

        // Step 2: the sender funds it or rejects.
        let amount = self.config.amount;
        let decision = match self.config.policy.kind {
            PolicyKind::Random | PolicyKind::FixedPrice => {
                let candidates = feasible_shard_sets(
                    &self.agents[sender_id],
                    deposit,
                    amount,
                    &self.pool,
                    &params,
                    self.config.k_max,
                );
                if candidates.is_empty() {
                    FulfillmentResult::Rejected {
                        reason: crate::agent::RejectReason::InsufficientFunds,
                    }
                } else {
                    let pick = match self.config.policy.kind {
                        // Random: uniform over the feasible sets.
                        PolicyKind::Random => self.rng.gen_range(0..candidates.len()),
                        // Fixed price: all candidates tie.
                        _ => {
                            let all: Vec<usize> = (0..candidates.len()).collect();
                            break_tie(&all, tie, &mut self.rng)
                        }
                    };
                    let (shard_set, fee) = candidates.into_iter().nth(pick).expect("in range");
                    FulfillmentResult::Accepted { shard_set, fee }
                }
            }
            PolicyKind::BestResponse => choose_send_shards(
                &self.agents[sender_id],
                receiver_id,
                deposit,
                amount,
                &self.pool,
                &params,
                self.config.k_max,
                tie,
                if sticky { self.edge_memory[edge].1 } else { None },
                &mut self.rng,
            ),
        };

        let (accepted, fee) = match decision {
            FulfillmentResult::Accepted { shard_set, fee } => {
                let (sender, receiver) =
                    two_agents_mut(&mut self.agents, sender_id, receiver_id);
                let tx = settle(sender, receiver, deposit, &shard_set, amount, fee)?;
                self.fees_burned += fee;

                // Both edge sides learn from the settled transaction: the
                // sender logs the requested deposit shard, the receiver
                // logs the funding shards (the deposit shard itself for a
                // single-shard transaction).
                let sender_est = sender
                    .request_estimates
                    .get_mut(&receiver_id)
                    .expect("edge estimates registered");
                sender_est.estimate_into(&mut self.scratch);
                for (mix, q) in self.request_mix_sum.iter_mut().zip(&self.scratch) {
                    *mix -= q;
                }
                sender_est.observe(deposit);
                sender_est.estimate_into(&mut self.scratch);
                for (mix, q) in self.request_mix_sum.iter_mut().zip(&self.scratch) {
                    *mix += q;
                }
                let receiver_est = receiver
                    .sending_estimates
                    .get_mut(&sender_id)
                    .expect("edge estimates registered");
                if shard_set.len() == 1 {
                    receiver_est.observe(deposit);
                } else {
                    for &s in shard_set.iter().filter(|s| **s != deposit) {
                        receiver_est.observe(s);
                    }
                }
                let withdrawal = *shard_set.iter().find(|s| **s != deposit).unwrap_or(&deposit);
                self.edge_memory[edge] = (Some(deposit), Some(withdrawal));

                self.pool.push(tx);
                (true, fee)
            }
            FulfillmentResult::Rejected { .. } => (false, 0.0),
        };

        let boundary = self.pool.should_assemble(self.config.slots);
        let mut usage = Vec::with_capacity(m);
        self.pool.shard_usage_into(&mut usage);
        self.pool.shard_loading_into(&mut self.scratch);
        let loading_sum: f64 = self.scratch.iter().sum();
        let edge_count = self.network.edge_count() as f64;
        let request_spread: f64 = self
            .request_mix_sum
            .iter()
            .map(|q| (q / edge_count - 1.0 / m as f64).max(0.0))
            .sum();
        self.trace.push(MetricSample {
            tx_index: self.attempts,
            usage,
            loading_sum,
            mean_cardinality: self.pool.mean_cardinality(),
            fee,
            accepted,
            block_index: self.blocks.len() as u64,
            block_boundary: boundary,
            request_spread,
        });

        self.attempts += 1;
        self.attempts_since_block += 1;
        if boundary {
            let block = Block::assemble(self.blocks.len() as u64, &mut self.pool)?;
            self.blocks.push(block);
            self.attempts_since_block = 0;
            self.resync_request_mix();
        } else {
            let capacity = (m * self.config.slots) as u64;
            if self.attempts_since_block > capacity.saturating_mul(100) {
                return Err(Error::Stalled {
                    attempts: self.attempts_since_block,
                    blocks: self.blocks.len(),
                });
            }
        }
        Ok(self.trace.last().expect("sample just pushed"))
    }

    /// Recomputes the request-mix sum from scratch, clearing the float
    /// drift of incremental updates.
    fn resync_request_mix(&mut self) {
        self.request_mix_sum.iter_mut().for_each(|q| *q = 0.0);
        for &(i, j) in self.network.edges() {
            let est = &self.agents[j].request_estimates[&i];
            est.estimate_into(&mut self.scratch);
            for (mix, q) in self.request_mix_sum.iter_mut().zip(&self.scratch) {
                *mix += q;
            }
        }
    }

    /// Wraps up a finished run.
    pub fn finish(self) -> RunResult {
        assert!(self.is_done(), "run not finished");
        let accepted: u64 = self.blocks.iter().map(|b| b.transaction_count() as u64).sum();
        let totals = RunTotals {
            attempts: self.attempts,
            accepted,
            rejected: self.attempts - accepted,
            fees_burned: self.fees_burned,
            final_efficiency: self.blocks.last().map(|b| b.efficiency).unwrap_or(0.0),
        };
        RunResult {
            edge_count: self.network.edge_count(),
            config: self.config,
            blocks: self.blocks,
            trace: self.trace,
            totals,
        }
    }
}

/// Simulates the scenario to its block target.
pub fn run(config: &ScenarioConfig) -> Result<RunResult> {
    let mut state = SimState::new(config.clone())?;
    while !state.is_done() {
        state.step()?;
    }
    Ok(state.finish())
}

fn two_agents_mut(
    agents: &mut [AgentState],
    a: AgentId,
    b: AgentId,
) -> (&mut AgentState, &mut AgentState) {
    assert_ne!(a, b, "self-payment has no edge");
    if a < b {
        let (lo, hi) = agents.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = agents.split_at_mut(a);
        let (first, second) = (&mut hi[0], &mut lo[b]);
        (first, second)
    }
}
