//! The fee function and the expectation matrices behind strategic play.
//!
//! A transaction touching shard set `S` with pool balance `B(S)` pays
//!
//! ```text
//! f = p0 + (1 − B(S) / |S|^α) · p_max
//! ```
//!
//! so fees rise when a transaction leans on loaded shards (low `B`) or
//! spreads across many shards (`|S|^α` discounts the balance). With `α = 0`
//! only congestion is priced; with `α > 0` cross-shard transactions pay a
//! premium even on idle shards.
//!
//! When shard choices are random variables rather than fixed, every
//! expectation the agents care about is a bilinear form `wᵀ M v` over the
//! receiver's request distribution `w` and the sender's funding distribution
//! `v`. The matrix depends on the question asked: expected cardinality,
//! expected balance, expected single-transaction efficiency, or the
//! fee-relevant combination of the last two. All of them are `m×m`,
//! symmetric, and cheap to rebuild from the live pool's loading vector.

use serde::{Deserialize, Serialize};

use crate::ledger::{ShardId, TransactionPool};
use crate::{Error, Result};

/// Fee-function parameters: base fee `p0`, fee ceiling `p_max`, and the
/// cardinality exponent `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricingParams {
    /// Base fee charged regardless of shard choice.
    pub p0: f64,
    /// Fee range: a maximally inefficient transaction pays `p0 + p_max`.
    pub p_max: f64,
    /// Cardinality exponent; 0 prices congestion only, larger values push
    /// harder toward single-shard transactions.
    pub alpha: f64,
}

impl Default for PricingParams {
    fn default() -> Self {
        Self { p0: 0.0, p_max: 1.0, alpha: 0.0 }
    }
}

impl PricingParams {
    pub fn validate(&self) -> Result<()> {
        if !self.p0.is_finite() || self.p0 < 0.0 {
            return Err(Error::InvalidConfig(format!("p0 must be finite and >= 0, got {}", self.p0)));
        }
        if !self.p_max.is_finite() || self.p_max < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "p_max must be finite and >= 0, got {}",
                self.p_max
            )));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "alpha must be finite and >= 0, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// `2^{−α}`, the per-step cardinality discount, via `exp(−α·ln 2)` so
    /// the tiny exponents the experiments use stay well-conditioned.
    pub fn halving(&self) -> f64 {
        (-self.alpha * std::f64::consts::LN_2).exp()
    }

    /// Maps an expected-balance-style bilinear value in `[0,1]` to a fee.
    pub fn fee_from_expectation(&self, expectation: f64) -> f64 {
        self.p0 + (1.0 - expectation) * self.p_max
    }
}

/// Fee for a transaction over `shards` against the current pool:
/// `p0 + (1 − B(S)/|S|^α) · p_max`.
pub fn price(shards: &[ShardId], pool: &TransactionPool, params: &PricingParams) -> Result<f64> {
    if shards.is_empty() {
        return Err(Error::InvalidTransaction("cannot price an empty shard set".into()));
    }
    let balance = pool.shard_balance(shards);
    Ok(price_from_balance(balance, shards.len(), params))
}

/// Same fee computed from a precomputed balance, for callers that already
/// hold the loading vector.
pub fn price_from_balance(balance: f64, cardinality: usize, params: &PricingParams) -> f64 {
    let discounted = balance / (cardinality as f64).powf(params.alpha);
    params.fee_from_expectation(discounted)
}

/// Dense symmetric `m×m` matrix for the strategy-expectation bilinear forms.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    m: usize,
    entries: Vec<f64>,
}

impl Matrix {
    fn from_fn(m: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        assert!(m >= 1, "need at least one shard");
        let mut entries = Vec::with_capacity(m * m);
        for s in 0..m {
            for t in 0..m {
                entries.push(f(s, t));
            }
        }
        Self { m, entries }
    }

    /// Expected cardinality: `wᵀ M v` counts 1 when both sides land on the
    /// same shard and 2 otherwise.
    pub fn expected_cardinality(m: usize) -> Self {
        Self::from_fn(m, |s, t| if s == t { 1.0 } else { 2.0 })
    }

    /// Expected shard balance of the transaction's shard set:
    /// diagonal `1 − λ_s`, off-diagonal `1 − λ_s − λ_t`.
    pub fn expected_balance(loading: &[f64]) -> Self {
        Self::from_fn(loading.len(), |s, t| {
            if s == t {
                1.0 - loading[s]
            } else {
                1.0 - loading[s] - loading[t]
            }
        })
    }

    /// Expected single-transaction efficiency: the balance matrix with
    /// off-diagonal entries halved for the cardinality-2 outcomes.
    pub fn expected_efficiency(loading: &[f64]) -> Self {
        Self::from_fn(loading.len(), |s, t| {
            if s == t {
                1.0 - loading[s]
            } else {
                (1.0 - loading[s] - loading[t]) / 2.0
            }
        })
    }

    /// The fee-relevant expectation matrix: diagonal `1 − λ_s`, off-diagonal
    /// `(1 − λ_s − λ_t)/2^α`. The expected fee is then
    /// `p0 + (1 − wᵀ P v) · p_max`, and with `α = 1` this matrix coincides
    /// with [`Matrix::expected_efficiency`].
    ///
    /// Loading vectors satisfy `Σλ ≤ 1 − 1/m`, so entries live in
    /// `[1/m · 2^{−α}, 1]` already; clamping to `[0, 1]` is purely a guard
    /// against float drift and is asserted dead in debug builds.
    pub fn price(loading: &[f64], alpha: f64) -> Self {
        let halving = (-alpha * std::f64::consts::LN_2).exp();
        Self::from_fn(loading.len(), |s, t| {
            let raw = if s == t {
                1.0 - loading[s]
            } else {
                (1.0 - loading[s] - loading[t]) * halving
            };
            debug_assert!((-1e-12..=1.0 + 1e-12).contains(&raw), "price entry {raw} out of range");
            raw.clamp(0.0, 1.0)
        })
    }

    /// All-ones matrix: the `α = 0`, zero-loading degenerate case where
    /// every strategy is payoff-equivalent.
    pub fn ones(m: usize) -> Self {
        Self::from_fn(m, |_, _| 1.0)
    }

    /// Builds a matrix from raw row-major entries. Escape hatch for tests
    /// and fault-injection harnesses; the structured constructors are the
    /// normal path.
    pub fn from_entries(m: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), m * m, "need m×m entries");
        Self { m, entries }
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn entry(&self, s: usize, t: usize) -> f64 {
        self.entries[s * self.m + t]
    }

    /// `wᵀ M v`.
    pub fn bilinear(&self, w: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(w.len(), self.m);
        debug_assert_eq!(v.len(), self.m);
        let mut acc = 0.0;
        for s in 0..self.m {
            if w[s] == 0.0 {
                continue;
            }
            let row = &self.entries[s * self.m..(s + 1) * self.m];
            let mut dot = 0.0;
            for t in 0..self.m {
                dot += row[t] * v[t];
            }
            acc += w[s] * dot;
        }
        acc
    }

    /// `(M v)` into `out`: the per-request-shard payoffs against a fixed
    /// sending distribution.
    pub fn mul_vec(&self, v: &[f64], out: &mut Vec<f64>) {
        debug_assert_eq!(v.len(), self.m);
        out.clear();
        for s in 0..self.m {
            let row = &self.entries[s * self.m..(s + 1) * self.m];
            out.push(row.iter().zip(v).map(|(a, b)| a * b).sum());
        }
    }

    /// `(wᵀ M)` into `out`: the per-sending-shard payoffs against a fixed
    /// request distribution. Equals [`Matrix::mul_vec`] for symmetric
    /// matrices but kept separate so the two decision sides read as written.
    pub fn vec_mul(&self, w: &[f64], out: &mut Vec<f64>) {
        debug_assert_eq!(w.len(), self.m);
        out.clear();
        out.resize(self.m, 0.0);
        for s in 0..self.m {
            if w[s] == 0.0 {
                continue;
            }
            let row = &self.entries[s * self.m..(s + 1) * self.m];
            for t in 0..self.m {
                out[t] += w[s] * row[t];
            }
        }
    }
}

fn check_simplex(x: &[f64], context: &'static str) -> Result<()> {
    if x.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::NotSimplex { context, sum: f64::NAN });
    }
    let sum: f64 = x.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotSimplex { context, sum });
    }
    Ok(())
}

/// Expected fee of a transaction whose request shard is drawn from `w` and
/// funding shard from `v`: `p0 + (1 − wᵀ P v) · p_max` for the price matrix
/// `P`. Both distributions must sit on the simplex.
pub fn expected_price(w: &[f64], v: &[f64], p: &Matrix, params: &PricingParams) -> Result<f64> {
    check_simplex(w, "request distribution")?;
    check_simplex(v, "sending distribution")?;
    Ok(params.fee_from_expectation(p.bilinear(w, v)))
}
