//! What one agent does when asked to receive or send a payment.
//!
//! The receiver of a payment picks the single shard it wants the deposit
//! in. The sender then picks which shards to fund the withdrawal from,
//! constrained to sets that can actually cover amount plus fee, and either
//! fulfills or rejects. Both choices trade off the same two costs with a
//! priority weight `γ`:
//!
//! * the immediate fee of the transaction being built, priced against the
//!   live pool, and
//! * the expected fee of future transactions on this edge, estimated by
//!   best-responding to the observed behavior of the counterparty against
//!   the forecast congestion of the pool (live loading with a few slices
//!   of counting noise written off, see [`forecast_loading`]).
//!
//! With `γ = 0` (the long-horizon agents the experiments use) the choices
//! reduce exactly to the pure best responses of [`crate::game`] against
//! the forecast price matrix; with `γ = 1` agents chase the cheapest
//! immediate fee and ignore the future. Everything is expressed in fee
//! units, so a degenerate fee schedule (`p_max = 0`) makes every option
//! tie and the tie-break policy decides.

use std::collections::BTreeMap;

use rand::Rng;

use crate::game::{argmax_ties, break_tie, EmpiricalEstimate, TieBreak};
use crate::ledger::{AgentId, ShardId, Transaction, TransactionPool};
use crate::pricing::{price_from_balance, Matrix, PricingParams};
use crate::{Error, Result};

/// Relative slack when draining funding shards: covers the float rounding
/// of chained subtractions, nothing more.
const DRAIN_SLACK: f64 = 1e-9;

/// Fraction of the transfer amount used as the nominal marker entry for
/// funding-only shards in the amount vector.
const MARKER_FRACTION: f64 = 1e-6;

/// Slices of usage excess an agent writes off as counting noise when
/// forecasting congestion.
///
/// A pool whose shards sit within a couple of slices of a perfectly even
/// split is balanced for every practical purpose; which shard happens to
/// hold the odd slice flips on nearly every settlement. Agents forecasting
/// the fee of future transactions therefore ignore excess below this many
/// slices and only react to loading that is persistent at the scale of the
/// pool. Without the write-off, both ends of an edge would chase the
/// momentary minimum, land on the same near-empty shard far more often
/// than their independent preferences warrant, and single-shard traffic
/// would be overstated whenever the fee schedule itself is indifferent to
/// cardinality. Forecast behavior is insensitive to the exact value over a
/// wide range; it only needs to sit above the slice-quantization noise and
/// below any loading worth reacting to.
pub const FORECAST_NOISE_SLICES: f64 = 3.0;

/// The loading vector an agent plugs into its future-fee forecasts: pool
/// loading with up to [`FORECAST_NOISE_SLICES`] slices of excess forgiven
/// per shard. The empty pool forecasts as perfectly balanced.
pub fn forecast_loading(pool: &TransactionPool) -> Vec<f64> {
    let total = pool.total_usages() as f64;
    let mut loading = pool.shard_loading();
    if total > 0.0 {
        let slack = FORECAST_NOISE_SLICES / total;
        for l in loading.iter_mut() {
            *l = (*l - slack).max(0.0);
        }
    }
    loading
}

/// One agent: its per-shard balances, fee-priority weights, and what it has
/// learned about each neighbor's shard habits.
///
/// `sending_estimates[j]` is this agent's histogram of the shards from
/// which neighbor `j` funded past payments to it (the `v̂` it best-responds
/// to when receiving). `request_estimates[i]` is the histogram of deposit
/// shards neighbor `i` asked for in the past (the `ŵ` used when sending).
#[derive(Debug, Clone)]
pub struct AgentState {
    pub id: AgentId,
    pub balances: Vec<f64>,
    pub gamma_r: f64,
    pub gamma_s: f64,
    pub sending_estimates: BTreeMap<AgentId, EmpiricalEstimate>,
    pub request_estimates: BTreeMap<AgentId, EmpiricalEstimate>,
}

impl AgentState {
    pub fn new(id: AgentId, shards: usize, gamma_r: f64, gamma_s: f64) -> Self {
        Self {
            id,
            balances: vec![0.0; shards],
            gamma_r,
            gamma_s,
            sending_estimates: BTreeMap::new(),
            request_estimates: BTreeMap::new(),
        }
    }

    /// Registers the neighbors this agent requests from (`senders`) and the
    /// neighbors that request from it (`receivers`), seeding uniform-prior
    /// estimates for each.
    pub fn register_neighbors(&mut self, senders: &[AgentId], receivers: &[AgentId]) {
        let m = self.balances.len();
        for &j in senders {
            self.sending_estimates.entry(j).or_insert_with(|| EmpiricalEstimate::new(m));
        }
        for &i in receivers {
            self.request_estimates.entry(i).or_insert_with(|| EmpiricalEstimate::new(m));
        }
    }

    pub fn total_balance(&self) -> f64 {
        self.balances.iter().sum()
    }
}

/// Sender's verdict on a payment request.
#[derive(Debug, Clone, PartialEq)]
pub enum FulfillmentResult {
    /// A feasible funding plan exists; the transaction will touch
    /// `shard_set` and pay `fee`.
    Accepted { shard_set: Vec<ShardId>, fee: f64 },
    /// No candidate shard set can cover amount plus fee.
    Rejected { reason: RejectReason },
}

impl FulfillmentResult {
    pub fn is_accepted(&self) -> bool {
        matches!(self, FulfillmentResult::Accepted { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    InsufficientFunds,
}

/// The receiver's decision: which shard to collect the deposit in.
///
/// Minimizes `γ_r · f_now(s) + (1 − γ_r) · E[fee of future transactions]`
/// where the immediate term prices the single-shard transaction in `s`
/// against the live pool and the future term best-responds to the
/// estimated funding distribution `v̂` of this sender. Ties resolve per the
/// tie-break mode; when `prior` names a shard that is still tied-optimal
/// (typically the shard this receiver requested from this sender last
/// time), it is kept instead of re-randomizing.
pub fn choose_request_shard<R: Rng + ?Sized>(
    receiver: &AgentState,
    sender: AgentId,
    pool: &TransactionPool,
    params: &PricingParams,
    tie: TieBreak,
    prior: Option<ShardId>,
    rng: &mut R,
) -> ShardId {
    let m = pool.shard_count();
    let loading = pool.shard_loading();
    let p = Matrix::price(&forecast_loading(pool), params.alpha);
    let v_hat = match receiver.sending_estimates.get(&sender) {
        Some(est) => est.estimate(),
        None => vec![1.0 / m as f64; m],
    };
    let mut future = Vec::new();
    p.mul_vec(&v_hat, &mut future);
    // Scores are negated fee-unit costs so the shared argmax helper applies.
    let scores: Vec<f64> = (0..m)
        .map(|s| {
            let now = params.p0 + loading[s] * params.p_max;
            let later = params.fee_from_expectation(future[s]);
            -(receiver.gamma_r * now + (1.0 - receiver.gamma_r) * later)
        })
        .collect();
    let ties = argmax_ties(&scores);
    if let Some(p) = prior {
        if ties.contains(&p.0) {
            return p;
        }
    }
    ShardId(break_tie(&ties, tie, rng))
}

/// All feasible transaction shard sets for the sender, paired with the fee
/// each would pay right now.
///
/// A candidate is any shard set containing the deposit shard with at most
/// `k_max` shards; it is feasible when the sender's combined balance over
/// the set covers `amount` plus the fee of that exact set (the fee depends
/// on the set, not the amount, so no fixed-point iteration is needed).
/// Candidates come back sorted by cardinality, then lexicographically.
/// Enumeration visits every subset of size `< k_max` of the other shards,
/// which is fine for the small `k_max` values scenarios use.
pub fn feasible_shard_sets(
    sender: &AgentState,
    deposit: ShardId,
    amount: f64,
    pool: &TransactionPool,
    params: &PricingParams,
    k_max: usize,
) -> Vec<(Vec<ShardId>, f64)> {
    debug_assert!(k_max >= 1);
    let m = pool.shard_count();
    let loading = pool.shard_loading();
    let mut out = Vec::new();
    let mut others = Vec::new();
    let feasible = |others: &[usize], out: &mut Vec<(Vec<ShardId>, f64)>| {
        let mut set: Vec<ShardId> = Vec::with_capacity(others.len() + 1);
        set.extend(others.iter().map(|&s| ShardId(s)));
        set.push(deposit);
        set.sort_unstable();
        let balance = 1.0 - set.iter().map(|s| loading[s.0]).sum::<f64>();
        let fee = price_from_balance(balance, set.len(), params);
        let funds: f64 = set.iter().map(|s| sender.balances[s.0]).sum();
        if funds >= amount + fee {
            out.push((set, fee));
        }
    };
    // Subsets of the non-deposit shards in size order, lexicographic within
    // a size, each extended by the deposit shard.
    for extra in 0..k_max.min(m) {
        subsets_of_size(m, deposit.0, extra, 0, &mut others, &mut |chosen| {
            feasible(chosen, &mut out)
        });
    }
    out
}

fn subsets_of_size(
    m: usize,
    skip: usize,
    size: usize,
    from: usize,
    scratch: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if scratch.len() == size {
        visit(scratch);
        return;
    }
    for s in from..m {
        if s == skip {
            continue;
        }
        scratch.push(s);
        subsets_of_size(m, skip, size, s + 1, scratch, visit);
        scratch.pop();
    }
}

/// The sender's decision: fulfill from the cheapest feasible shard set or
/// reject.
///
/// Each feasible candidate is scored by
/// `γ_s · fee(S) + (1 − γ_s) · E[fee of future transactions]`, where the
/// future term evaluates the expected fee against the estimated request
/// distribution `ŵ` of this receiver, with the funding side spread
/// uniformly over the candidate's shards. For singletons and `γ_s = 0`
/// this is exactly the pure sending best response restricted to affordable
/// shards.
///
/// `prior` carries inertia across decisions: it names the shard this
/// sender last withdrew from toward this receiver, and among tied-optimal
/// candidates the one anchored on that shard is kept rather than
/// re-randomizing. A candidate's anchor is its withdrawal side: the
/// non-deposit shards of a multi-shard set, or the deposit shard itself
/// for a singleton.
pub fn choose_send_shards<R: Rng + ?Sized>(
    sender: &AgentState,
    receiver: AgentId,
    deposit: ShardId,
    amount: f64,
    pool: &TransactionPool,
    params: &PricingParams,
    k_max: usize,
    tie: TieBreak,
    prior: Option<ShardId>,
    rng: &mut R,
) -> FulfillmentResult {
    let candidates = feasible_shard_sets(sender, deposit, amount, pool, params, k_max);
    if candidates.is_empty() {
        return FulfillmentResult::Rejected { reason: RejectReason::InsufficientFunds };
    }
    let m = pool.shard_count();
    let p = Matrix::price(&forecast_loading(pool), params.alpha);
    let w_hat = match sender.request_estimates.get(&receiver) {
        Some(est) => est.estimate(),
        None => vec![1.0 / m as f64; m],
    };
    let mut row = Vec::new();
    p.vec_mul(&w_hat, &mut row);
    let scores: Vec<f64> = candidates
        .iter()
        .map(|(set, fee)| {
            let expectation =
                set.iter().map(|s| row[s.0]).sum::<f64>() / set.len() as f64;
            let later = params.fee_from_expectation(expectation);
            -(sender.gamma_s * fee + (1.0 - sender.gamma_s) * later)
        })
        .collect();
    let mut ties = argmax_ties(&scores);
    if let Some(p) = prior {
        let anchored = |set: &[ShardId]| {
            if set.len() == 1 {
                set[0] == p
            } else {
                p != deposit && set.contains(&p)
            }
        };
        let kept: Vec<usize> =
            ties.iter().copied().filter(|&c| anchored(&candidates[c].0)).collect();
        if !kept.is_empty() {
            ties = kept;
        }
    }
    let pick = break_tie(&ties, tie, rng);
    let (shard_set, fee) = candidates.into_iter().nth(pick).expect("picked index in range");
    FulfillmentResult::Accepted { shard_set, fee }
}

/// Settles an accepted payment: withdraws `amount + fee` from the sender
/// across the funding shards (greedily, fullest shard first), deposits
/// `amount` into the receiver's chosen shard, burns the fee, and returns
/// the pool-ready transaction.
///
/// The transaction's amount vector carries the full amount on the deposit
/// shard minus nominal markers on funding-only shards, so its support is
/// exactly the priced shard set and its total is exactly the amount.
pub fn settle(
    sender: &mut AgentState,
    receiver: &mut AgentState,
    deposit: ShardId,
    shard_set: &[ShardId],
    amount: f64,
    fee: f64,
) -> Result<Transaction> {
    debug_assert!(shard_set.contains(&deposit));
    debug_assert!(shard_set.windows(2).all(|w| w[0] < w[1]), "shard set must be sorted");
    let m = sender.balances.len();
    let mut remaining = amount + fee;
    // Fullest shards first; equal balances fall back to index order.
    let mut order: Vec<ShardId> = shard_set.to_vec();
    order.sort_by(|a, b| {
        sender.balances[b.0]
            .partial_cmp(&sender.balances[a.0])
            .expect("balances are finite")
            .then(a.0.cmp(&b.0))
    });
    let slack = DRAIN_SLACK * (1.0 + amount + fee);
    for s in order {
        if remaining <= 0.0 {
            break;
        }
        let have = sender.balances[s.0];
        if have >= remaining {
            sender.balances[s.0] = have - remaining;
            remaining = 0.0;
        } else {
            sender.balances[s.0] = 0.0;
            remaining -= have;
        }
    }
    if remaining > slack {
        return Err(Error::Overdraw { shard: deposit.0, need: remaining, have: 0.0 });
    }
    receiver.balances[deposit.0] += amount;

    let marker = amount * MARKER_FRACTION;
    let mut amounts = vec![0.0; m];
    for s in shard_set {
        amounts[s.0] = marker;
    }
    amounts[deposit.0] = amount - marker * (shard_set.len() - 1) as f64;
    Transaction::new(receiver.id, sender.id, amounts, fee)
}
