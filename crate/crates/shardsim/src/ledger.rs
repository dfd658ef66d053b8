//! Transactions, the pending pool, and the shard-level throughput metrics.
//!
//! A transaction moves an amount between two agents and touches a set of
//! shards: the shard the receiver collects in plus whatever shards the sender
//! funds from. The pool is the staging area between block cuts; everything
//! the simulator prices or optimizes is a function of which shards the
//! pooled transactions touch:
//!
//! * usage `u_s`: the fraction of all shard touches attributable to shard `s`,
//! * loading `λ_s = max(0, u_s − 1/m)`: the excess over a perfectly even
//!   spread,
//! * balance `B(S) = 1 − Σ_{s∈S} λ_s`: how evenly loaded a shard set is,
//! * efficiency `F = B / mean cardinality`: balance discounted by how many
//!   shards the average transaction drags in.
//!
//! Efficiency is the throughput proxy: a block holds `σ` transactions per
//! shard, so a pool of single-shard transactions spread perfectly evenly
//! (`F = 1`) fills a block with the theoretical maximum `m·σ` transactions,
//! while cross-shard or lopsided pools cut blocks early.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Index of a shard, in `[0, m)` for the scenario's shard count `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShardId(pub usize);

impl ShardId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl std::fmt::Display for ShardId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Agents are addressed by their position in the scenario's agent list.
pub type AgentId = usize;

/// A settled payment: `sender` pays `amounts` (summing to the transferred
/// amount) into the shards it touches, with the receiver's deposit shard
/// carrying nearly all of it and funding-only shards carrying a nominal
/// marker so the shard set can be read back off the vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transaction {
    pub receiver: AgentId,
    pub sender: AgentId,
    amounts: Vec<f64>,
    pub fee_paid: f64,
}

impl Transaction {
    /// Validates and builds a transaction. `amounts` must be non-negative
    /// with a strictly positive total, and the fee must be non-negative.
    pub fn new(receiver: AgentId, sender: AgentId, amounts: Vec<f64>, fee_paid: f64) -> Result<Self> {
        if amounts.is_empty() {
            return Err(Error::InvalidTransaction("empty amount vector".into()));
        }
        if let Some(s) = amounts.iter().position(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidTransaction(format!(
                "amount for shard {s} is {}",
                amounts[s]
            )));
        }
        if amounts.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidTransaction("total amount must be positive".into()));
        }
        if !fee_paid.is_finite() || fee_paid < 0.0 {
            return Err(Error::InvalidTransaction(format!("fee is {fee_paid}")));
        }
        Ok(Self { receiver, sender, amounts, fee_paid })
    }

    /// Per-shard amount vector, dense over all `m` shards.
    pub fn amounts(&self) -> &[f64] {
        &self.amounts
    }

    /// Total amount transferred (the sum of the amount vector).
    pub fn total_amount(&self) -> f64 {
        self.amounts.iter().sum()
    }

    /// The shards this transaction touches: every shard with a positive
    /// amount entry.
    pub fn shard_set(&self) -> impl Iterator<Item = ShardId> + '_ {
        self.amounts
            .iter()
            .enumerate()
            .filter(|(_, a)| **a > 0.0)
            .map(|(s, _)| ShardId(s))
    }

    /// Number of distinct shards touched.
    pub fn cardinality(&self) -> usize {
        self.amounts.iter().filter(|a| **a > 0.0).count()
    }

    pub fn uses_shard(&self, shard: ShardId) -> bool {
        self.amounts[shard.0] > 0.0
    }
}

/// The pending transaction pool, with incrementally maintained per-shard
/// usage counts. `per_shard_counts[s]` is the number of pooled transactions
/// touching shard `s`, and `total_usages` is the sum of all cardinalities;
/// both always match a from-scratch recount.
#[derive(Debug, Clone)]
pub struct TransactionPool {
    transactions: Vec<Transaction>,
    per_shard_counts: Vec<usize>,
    total_usages: usize,
}

impl TransactionPool {
    pub fn new(shards: usize) -> Self {
        assert!(shards >= 1, "need at least one shard");
        Self {
            transactions: Vec::new(),
            per_shard_counts: vec![0; shards],
            total_usages: 0,
        }
    }

    pub fn shard_count(&self) -> usize {
        self.per_shard_counts.len()
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    /// Number of pooled transactions touching each shard.
    pub fn per_shard_counts(&self) -> &[usize] {
        &self.per_shard_counts
    }

    /// Sum of cardinalities over the pool.
    pub fn total_usages(&self) -> usize {
        self.total_usages
    }

    /// Appends a transaction, updating the usage counts incrementally.
    pub fn push(&mut self, tx: Transaction) {
        assert_eq!(tx.amounts.len(), self.shard_count(), "shard count mismatch");
        for s in tx.shard_set() {
            self.per_shard_counts[s.0] += 1;
            self.total_usages += 1;
        }
        self.transactions.push(tx);
    }

    /// Empties the pool and returns its contents, zeroing the counts.
    pub fn drain(&mut self) -> Vec<Transaction> {
        self.per_shard_counts.iter_mut().for_each(|c| *c = 0);
        self.total_usages = 0;
        std::mem::take(&mut self.transactions)
    }

    /// Shard usage `u_s = |P_s| / Σ_T |S_T|`. The empty pool maps to the
    /// all-zeros vector so the first transaction of a fresh block is priced
    /// as if shards were perfectly balanced.
    pub fn shard_usage(&self) -> Vec<f64> {
        let mut u = vec![0.0; self.shard_count()];
        self.shard_usage_into(&mut u);
        u
    }

    pub fn shard_usage_into(&self, out: &mut Vec<f64>) {
        out.clear();
        if self.total_usages == 0 {
            out.resize(self.shard_count(), 0.0);
            return;
        }
        let total = self.total_usages as f64;
        out.extend(self.per_shard_counts.iter().map(|c| *c as f64 / total));
    }

    /// Shard loading `λ_s = max(0, u_s − 1/m)`, the usage excess over an
    /// even spread.
    pub fn shard_loading(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.shard_loading_into(&mut out);
        out
    }

    pub fn shard_loading_into(&self, out: &mut Vec<f64>) {
        self.shard_usage_into(out);
        let even = 1.0 / self.shard_count() as f64;
        for u in out.iter_mut() {
            *u = (*u - even).max(0.0);
        }
    }

    /// Shard balance `B(S) = 1 − Σ_{s∈S} λ_s` for a non-empty shard subset.
    pub fn shard_balance(&self, shards: &[ShardId]) -> f64 {
        debug_assert!(!shards.is_empty(), "balance of an empty shard set");
        let lambda = self.shard_loading();
        1.0 - shards.iter().map(|s| lambda[s.0]).sum::<f64>()
    }

    /// Balance over the full shard set, `1 − Σ_s λ_s`.
    pub fn balance(&self) -> f64 {
        1.0 - self.shard_loading().iter().sum::<f64>()
    }

    /// Mean cardinality over the pool; 0 for the empty pool.
    pub fn mean_cardinality(&self) -> f64 {
        if self.transactions.is_empty() {
            return 0.0;
        }
        self.total_usages as f64 / self.transactions.len() as f64
    }

    /// Pool efficiency `F = B / mean cardinality`, the per-block throughput
    /// proxy. Undefined (an error) for the empty pool.
    pub fn efficiency(&self) -> Result<f64> {
        if self.transactions.is_empty() {
            return Err(Error::EmptyPool("efficiency undefined for empty pool"));
        }
        Ok(self.balance() / self.mean_cardinality())
    }

    /// Efficiency of a single transaction against this pool,
    /// `B(S_T) / |S_T|`. The transaction need not be in the pool, which is
    /// what lets candidate transactions be priced before acceptance.
    pub fn transaction_efficiency(&self, tx: &Transaction) -> f64 {
        let shards: Vec<ShardId> = tx.shard_set().collect();
        self.shard_balance(&shards) / shards.len() as f64
    }

    /// Largest per-shard usage count, the block-cut statistic.
    pub fn max_shard_count(&self) -> usize {
        self.per_shard_counts.iter().copied().max().unwrap_or(0)
    }

    /// True once any shard has filled its `slots` block slots, i.e. the
    /// block must be cut. Triggers at `≥ slots` so no shard ever exceeds
    /// its capacity.
    pub fn should_assemble(&self, slots: usize) -> bool {
        debug_assert!(slots >= 1);
        self.max_shard_count() >= slots
    }
}

/// A cut block: the pool contents at assembly time plus the pool metrics
/// frozen at that instant.
#[derive(Debug, Clone)]
pub struct Block {
    pub index: u64,
    pub transactions: Vec<Transaction>,
    pub efficiency: f64,
    pub mean_cardinality: f64,
    pub balance: f64,
}

impl Block {
    /// Cuts a block from the pool: captures the metrics, drains the
    /// transactions, and leaves the pool empty. Assembling an empty pool is
    /// an error.
    pub fn assemble(index: u64, pool: &mut TransactionPool) -> Result<Self> {
        let efficiency = pool.efficiency()?;
        let mean_cardinality = pool.mean_cardinality();
        let balance = pool.balance();
        Ok(Self {
            index,
            transactions: pool.drain(),
            efficiency,
            mean_cardinality,
            balance,
        })
    }

    pub fn transaction_count(&self) -> usize {
        self.transactions.len()
    }
}

/// Per-agent, per-shard resource balances. Fees are burned on settlement,
/// so the grand total only ever decreases by the fees paid; that makes the
/// sheet auditable with one subtraction.
#[derive(Debug, Clone)]
pub struct BalanceSheet {
    shards: usize,
    rows: Vec<Vec<f64>>,
}

impl BalanceSheet {
    pub fn zeros(agents: usize, shards: usize) -> Self {
        Self { shards, rows: vec![vec![0.0; shards]; agents] }
    }

    pub fn agents(&self) -> usize {
        self.rows.len()
    }

    pub fn shards(&self) -> usize {
        self.shards
    }

    pub fn agent(&self, id: AgentId) -> &[f64] {
        &self.rows[id]
    }

    pub fn agent_mut(&mut self, id: AgentId) -> &mut [f64] {
        &mut self.rows[id]
    }

    /// Grand total across all agents and shards.
    pub fn total(&self) -> f64 {
        self.rows.iter().flatten().sum()
    }

    /// Hands each agent's row out in order, consuming the sheet.
    pub fn into_rows(self) -> Vec<Vec<f64>> {
        self.rows
    }
}
