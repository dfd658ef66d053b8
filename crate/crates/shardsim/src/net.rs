//! Request-network topologies and scenario configuration.
//!
//! The network fixes who may pay whom: a directed edge `(i, j)` means agent
//! `i` requests payments from agent `j`. Four generators cover the
//! experiments: a ring (everyone requests from both neighbors), a path
//! (the ring cut open), a complete digraph, and a preferential-attachment
//! graph whose long-tailed degree distribution stresses the pricing layer
//! with hub agents.
//!
//! A [`ScenarioConfig`] is the full recipe for a run: topology, shard and
//! slot counts, fee parameters, agent policy, transaction generation mode,
//! initial balances, and the seed. Scenario files are TOML with exactly
//! these fields plus a `schema_version`; see `docs/scenarios.md` for the
//! schema and `scenarios/` for ready-made files.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::game::TieBreak;
use crate::ledger::{AgentId, BalanceSheet};
use crate::pricing::PricingParams;
use crate::{Error, Result};

/// Version of the scenario file format accepted by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// Directed request network over `n` agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    agents: usize,
    edges: Vec<(AgentId, AgentId)>,
    requests_from: Vec<Vec<AgentId>>,
    requested_by: Vec<Vec<AgentId>>,
}

impl Network {
    fn from_edges(agents: usize, edges: Vec<(AgentId, AgentId)>) -> Self {
        let mut requests_from = vec![Vec::new(); agents];
        let mut requested_by = vec![Vec::new(); agents];
        for &(i, j) in &edges {
            debug_assert!(i != j, "self-loop {i}");
            debug_assert!(i < agents && j < agents);
            requests_from[i].push(j);
            requested_by[j].push(i);
        }
        Self { agents, edges, requests_from, requested_by }
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge list in construction order; the position of an edge in this
    /// list is its id everywhere else (strategy profiles, traces).
    pub fn edges(&self) -> &[(AgentId, AgentId)] {
        &self.edges
    }

    /// Agents that `i` requests payments from.
    pub fn requests_from(&self, i: AgentId) -> &[AgentId] {
        &self.requests_from[i]
    }

    /// Agents that request payments from `j`.
    pub fn requested_by(&self, j: AgentId) -> &[AgentId] {
        &self.requested_by[j]
    }

    /// Times `j` is the sender side of an edge.
    pub fn in_degree(&self, j: AgentId) -> usize {
        self.requested_by[j].len()
    }

    /// Ring of `n ≥ 3` agents, each requesting from both neighbors:
    /// `2n` directed edges.
    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidConfig(format!("ring needs at least 3 agents, got {n}")));
        }
        let mut edges = Vec::with_capacity(2 * n);
        for i in 0..n {
            edges.push((i, (i + n - 1) % n));
            edges.push((i, (i + 1) % n));
        }
        Ok(Self::from_edges(n, edges))
    }

    /// Path of `n ≥ 2` agents, each requesting from its adjacent
    /// neighbors: `2(n−1)` directed edges.
    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!("path needs at least 2 agents, got {n}")));
        }
        let mut edges = Vec::with_capacity(2 * (n - 1));
        for i in 0..n {
            if i > 0 {
                edges.push((i, i - 1));
            }
            if i + 1 < n {
                edges.push((i, i + 1));
            }
        }
        Ok(Self::from_edges(n, edges))
    }

    /// Complete digraph on `n ≥ 2` agents.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!("complete graph needs at least 2 agents, got {n}")));
        }
        let mut edges = Vec::with_capacity(n * (n - 1));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    edges.push((i, j));
                }
            }
        }
        Ok(Self::from_edges(n, edges))
    }

    /// Preferential-attachment graph: nodes arrive one at a time and
    /// request from `attach_k` distinct existing nodes, drawn with
    /// probability proportional to in-degree plus one. The first
    /// `attach_k + 1` nodes bootstrap by requesting from every earlier
    /// node, so the edge count is always `n·attach_k − attach_k(attach_k+1)/2`.
    /// Same seed, same graph.
    pub fn preferential_attachment(n: usize, attach_k: usize, seed: u64) -> Result<Self> {
        if attach_k < 1 || n <= attach_k {
            return Err(Error::InvalidConfig(format!(
                "preferential attachment needs n > attach_k >= 1, got n={n}, attach_k={attach_k}"
            )));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let mut edges = Vec::with_capacity(n * attach_k);
        let mut popularity = vec![0usize; n];
        for new in 1..n {
            if new <= attach_k {
                for t in 0..new {
                    edges.push((new, t));
                    popularity[t] += 1;
                }
                continue;
            }
            let mut chosen: Vec<AgentId> = Vec::with_capacity(attach_k);
            while chosen.len() < attach_k {
                let total: usize = (0..new)
                    .filter(|t| !chosen.contains(t))
                    .map(|t| popularity[t] + 1)
                    .sum();
                let mut ticket = rng.gen_range(0..total);
                for t in 0..new {
                    if chosen.contains(&t) {
                        continue;
                    }
                    let weight = popularity[t] + 1;
                    if ticket < weight {
                        chosen.push(t);
                        break;
                    }
                    ticket -= weight;
                }
            }
            for &t in &chosen {
                edges.push((new, t));
                popularity[t] += 1;
            }
        }
        Ok(Self::from_edges(n, edges))
    }
}

/// Topology section of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TopologyConfig {
    Ring { agents: usize },
    Path { agents: usize },
    Complete { agents: usize },
    PreferentialAttachment { agents: usize, attach_k: usize },
}

impl TopologyConfig {
    pub fn agents(&self) -> usize {
        match *self {
            TopologyConfig::Ring { agents }
            | TopologyConfig::Path { agents }
            | TopologyConfig::Complete { agents }
            | TopologyConfig::PreferentialAttachment { agents, .. } => agents,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            TopologyConfig::Ring { .. } => "ring",
            TopologyConfig::Path { .. } => "path",
            TopologyConfig::Complete { .. } => "complete",
            TopologyConfig::PreferentialAttachment { .. } => "preferential-attachment",
        }
    }
}

/// How transaction attempts are scheduled onto edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenerationMode {
    /// Every round visits each edge exactly once in a fresh random order.
    #[default]
    RoundShuffle,
    /// Each attempt draws an edge uniformly at random.
    UniformEdge,
}

/// How agents decide shards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    /// Receiver picks a uniform random shard; sender picks a uniform
    /// random feasible funding set.
    Random,
    /// Agents optimize as if every shard choice cost the same, so choices
    /// fall entirely to the tie-break; fees are still charged as
    /// configured.
    FixedPrice,
    /// The fee-minimizing policy: best responses against learned
    /// estimates.
    BestResponse,
}

/// Policy section of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    /// Receiver weight on the immediate fee versus expected future fees.
    #[serde(default)]
    pub gamma_r: f64,
    /// Sender weight on the immediate fee versus expected future fees.
    #[serde(default)]
    pub gamma_s: f64,
    #[serde(default)]
    pub tie_break: TieBreak,
}

/// Initial balance endowment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalanceConfig {
    pub mode: BalanceMode,
    pub amount: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BalanceMode {
    /// Agent `i` holds its whole endowment in shard `i mod m`, spreading
    /// the per-shard totals evenly across the population.
    Staggered,
    /// Every shard of every agent holds the full endowment amount.
    Uniform,
}

impl BalanceConfig {
    /// Builds the endowed balance sheet for `agents` agents over `shards`
    /// shards.
    pub fn build(&self, agents: usize, shards: usize) -> BalanceSheet {
        let mut sheet = BalanceSheet::zeros(agents, shards);
        for i in 0..agents {
            match self.mode {
                BalanceMode::Staggered => sheet.agent_mut(i)[i % shards] = self.amount,
                BalanceMode::Uniform => sheet.agent_mut(i).fill(self.amount),
            }
        }
        sheet
    }
}

/// The complete recipe for one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub seed: u64,
    /// Shard count `m`.
    pub shards: usize,
    /// Block slots per shard `σ`; a block is cut once any shard's pending
    /// count reaches this.
    pub slots: usize,
    /// Stop after this many blocks.
    pub blocks_target: usize,
    /// Amount transferred per transaction.
    pub amount: f64,
    /// Largest shard set a sender may spread a transaction over.
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    pub topology: TopologyConfig,
    pub pricing: PricingParams,
    pub policy: PolicyConfig,
    #[serde(default)]
    pub generation: GenerationMode,
    pub balances: BalanceConfig,
}

fn default_k_max() -> usize {
    2
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.schema_version != SCHEMA_VERSION {
            return fail(format!(
                "schema_version {} not supported (this build reads {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.shards < 1 || self.shards > 64 {
            return fail(format!("shards must be in 1..=64, got {}", self.shards));
        }
        if self.slots < 1 {
            return fail("slots must be at least 1".into());
        }
        if self.blocks_target < 1 {
            return fail("blocks_target must be at least 1".into());
        }
        if !self.amount.is_finite() || self.amount <= 0.0 {
            return fail(format!("amount must be positive, got {}", self.amount));
        }
        if self.k_max < 1 || self.k_max > self.shards {
            return fail(format!(
                "k_max must be in 1..=shards ({}), got {}",
                self.shards, self.k_max
            ));
        }
        self.pricing.validate()?;
        for (name, gamma) in [("gamma_r", self.policy.gamma_r), ("gamma_s", self.policy.gamma_s)] {
            if !(0.0..=1.0).contains(&gamma) {
                return fail(format!("{name} must be in [0,1], got {gamma}"));
            }
        }
        let agents = self.topology.agents();
        match self.topology {
            TopologyConfig::Ring { .. } if agents < 3 => {
                return fail(format!("ring needs at least 3 agents, got {agents}"))
            }
            TopologyConfig::Path { .. } | TopologyConfig::Complete { .. } if agents < 2 => {
                return fail(format!("{} needs at least 2 agents, got {agents}", self.topology.kind_name()))
            }
            TopologyConfig::PreferentialAttachment { attach_k, .. }
                if attach_k < 1 || agents <= attach_k =>
            {
                return fail(format!(
                    "preferential attachment needs agents > attach_k >= 1, got agents={agents}, attach_k={attach_k}"
                ))
            }
            _ => {}
        }
        if !self.balances.amount.is_finite() || self.balances.amount < 0.0 {
            return fail(format!("balance amount must be >= 0, got {}", self.balances.amount));
        }
        Ok(())
    }

    /// Builds the request network; preferential attachment draws from its
    /// own RNG stream derived from the scenario seed.
    pub fn build_network(&self) -> Result<Network> {
        match self.topology {
            TopologyConfig::Ring { agents } => Network::ring(agents),
            TopologyConfig::Path { agents } => Network::path(agents),
            TopologyConfig::Complete { agents } => Network::complete(agents),
            TopologyConfig::PreferentialAttachment { agents, attach_k } => {
                Network::preferential_attachment(agents, attach_k, self.seed)
            }
        }
    }

    /// Endowed balances for every agent per the balance spec.
    pub fn initial_balances(&self) -> BalanceSheet {
        self.balances.build(self.topology.agents(), self.shards)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ScenarioConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }
}
