//! Per-edge shard strategies, best responses, fictitious-play estimates,
//! and the potential function that makes the whole thing converge.
//!
//! Each directed network edge (receiver `i`, sender `j`) carries a pair of
//! mixed strategies over shards: the receiver's request distribution `w`
//! and the sender's funding distribution `v`. Against the fee-relevant
//! expectation matrix `P`, both sides of an edge share the same objective
//! `wᵀ P v` (maximizing it minimizes the expected fee), so the whole
//! network is a game with potential
//!
//! ```text
//! H = Σ_{(i,j) ∈ E} w_ij ᵀ P v_ij
//! ```
//!
//! Any unilateral strategy change moves `H` by exactly the deviator's own
//! utility change; [`verify_potential_step`] checks that identity
//! numerically on concrete profiles. With `P` held fixed, asynchronous
//! best-response sweeps therefore climb `H` monotonically onto a Nash
//! fixed point, which is the convergence engine behind the pricing layer.
//!
//! Agents never see their neighbors' strategies, only their transactions;
//! [`EmpiricalEstimate`] is the fictitious-play device, a normalized
//! histogram of observed shard choices, and best responses are computed
//! against it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ledger::ShardId;
use crate::pricing::Matrix;
use crate::{Error, Result};

/// Absolute tolerance for treating two strategy payoffs as tied.
pub const TIE_TOL: f64 = 1e-12;

/// How to resolve argmax ties between shards.
///
/// Lowest-index keeps runs bit-reproducible with no randomness, but in
/// degenerate all-tie situations (an `α = 0` scenario starting from an
/// empty pool ties every shard) it piles every agent onto shard 0. The
/// seeded-random mode breaks such ties uniformly from the run's RNG stream
/// and is the right choice for those scenarios.
///
/// Sticky-random draws fresh ties uniformly like seeded-random, but lets
/// callers keep a previously chosen shard for as long as it stays inside
/// the tie set (best response with inertia). Without that anchor, both
/// ends of a relationship re-randomize over the same near-empty shards on
/// every decision and their picks collide far more often than independent
/// preferences would, which understates multi-shard traffic in flat-fee
/// scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    LowestIndex,
    SeededRandom,
    StickyRandom,
}

/// Indices whose value is within [`TIE_TOL`] of the maximum.
pub fn argmax_ties(values: &[f64]) -> Vec<usize> {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v >= max - TIE_TOL)
        .map(|(s, _)| s)
        .collect()
}

/// Picks one index out of a tie set according to the tie-break mode.
///
/// Sticky-random has no memory of its own; it draws like seeded-random
/// here, and the inertia lives with the caller, who keeps its previous
/// pick without consulting this function when that pick is still tied.
pub fn break_tie<R: Rng + ?Sized>(ties: &[usize], tie: TieBreak, rng: &mut R) -> usize {
    debug_assert!(!ties.is_empty());
    match tie {
        TieBreak::LowestIndex => ties[0],
        TieBreak::SeededRandom | TieBreak::StickyRandom => ties[rng.gen_range(0..ties.len())],
    }
}

/// Pure best response of the requesting side: the shard `s*` maximizing
/// `(P v̂)_s` against the estimated sending distribution `v̂`, ties to the
/// lowest index. A bilinear objective over the simplex always attains its
/// maximum at a vertex, so the pure response is optimal among all mixed
/// strategies.
pub fn best_response_request(p: &Matrix, v_hat: &[f64]) -> ShardId {
    let mut payoffs = Vec::new();
    p.mul_vec(v_hat, &mut payoffs);
    ShardId(argmax_ties(&payoffs)[0])
}

/// [`best_response_request`] with an explicit tie-break mode.
pub fn best_response_request_with<R: Rng + ?Sized>(
    p: &Matrix,
    v_hat: &[f64],
    tie: TieBreak,
    rng: &mut R,
) -> ShardId {
    let mut payoffs = Vec::new();
    p.mul_vec(v_hat, &mut payoffs);
    ShardId(break_tie(&argmax_ties(&payoffs), tie, rng))
}

/// Pure best response of the sending side: the shard maximizing
/// `(ŵᵀ P)_t` against the estimated request distribution `ŵ`.
pub fn best_response_send(p: &Matrix, w_hat: &[f64]) -> ShardId {
    let mut payoffs = Vec::new();
    p.vec_mul(w_hat, &mut payoffs);
    ShardId(argmax_ties(&payoffs)[0])
}

/// [`best_response_send`] with an explicit tie-break mode.
pub fn best_response_send_with<R: Rng + ?Sized>(
    p: &Matrix,
    w_hat: &[f64],
    tie: TieBreak,
    rng: &mut R,
) -> ShardId {
    let mut payoffs = Vec::new();
    p.vec_mul(w_hat, &mut payoffs);
    ShardId(break_tie(&argmax_ties(&payoffs), tie, rng))
}

/// Mixed-strategy best response: the uniform mixture over all tied optimal
/// vertices. Its value equals the pure best response's value; returning the
/// whole tie set makes degenerate cases (the all-ones matrix ties every
/// shard) visible to callers.
pub fn mixed_best_response(p: &Matrix, v_hat: &[f64]) -> Vec<f64> {
    let mut payoffs = Vec::new();
    p.mul_vec(v_hat, &mut payoffs);
    let ties = argmax_ties(&payoffs);
    let mut w = vec![0.0; p.size()];
    let share = 1.0 / ties.len() as f64;
    for s in ties {
        w[s] = share;
    }
    w
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

/// The two mixed strategies riding one directed edge: the receiver's
/// request distribution `w` and the sender's funding distribution `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStrategy {
    w: Vec<f64>,
    v: Vec<f64>,
}

impl EdgeStrategy {
    pub fn new(w: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        check_simplex(&w, "request strategy")?;
        check_simplex(&v, "sending strategy")?;
        if w.len() != v.len() {
            return Err(Error::InvalidConfig("strategy sides of unequal length".into()));
        }
        Ok(Self { w, v })
    }

    /// Both sides deterministic: request `s_w`, send from `s_v`.
    pub fn pure(s_w: ShardId, s_v: ShardId, m: usize) -> Self {
        let mut w = vec![0.0; m];
        let mut v = vec![0.0; m];
        w[s_w.0] = 1.0;
        v[s_v.0] = 1.0;
        Self { w, v }
    }

    /// Both sides uniform over all `m` shards.
    pub fn uniform(m: usize) -> Self {
        Self { w: vec![1.0 / m as f64; m], v: vec![1.0 / m as f64; m] }
    }

    pub fn request(&self) -> &[f64] {
        &self.w
    }

    pub fn send(&self) -> &[f64] {
        &self.v
    }

    pub fn set_request(&mut self, w: Vec<f64>) -> Result<()> {
        check_simplex(&w, "request strategy")?;
        self.w = w;
        Ok(())
    }

    pub fn set_send(&mut self, v: Vec<f64>) -> Result<()> {
        check_simplex(&v, "sending strategy")?;
        self.v = v;
        Ok(())
    }

    /// This edge's contribution `wᵀ P v` to the potential.
    pub fn utility(&self, p: &Matrix) -> f64 {
        p.bilinear(&self.w, &self.v)
    }
}

/// One [`EdgeStrategy`] per network edge, in edge-list order.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    edges: Vec<EdgeStrategy>,
}

impl StrategyProfile {
    pub fn new(edges: Vec<EdgeStrategy>) -> Self {
        Self { edges }
    }

    pub fn uniform(edge_count: usize, m: usize) -> Self {
        Self { edges: vec![EdgeStrategy::uniform(m); edge_count] }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: usize) -> &EdgeStrategy {
        &self.edges[e]
    }

    pub fn edge_mut(&mut self, e: usize) -> &mut EdgeStrategy {
        &mut self.edges[e]
    }

    pub fn edges(&self) -> &[EdgeStrategy] {
        &self.edges
    }
}

/// Potential `H = Σ_edges wᵀ P v` of a whole profile.
pub fn potential(profile: &StrategyProfile, p: &Matrix) -> f64 {
    profile.edges.iter().map(|e| e.utility(p)).sum()
}

/// Potential plus the per-edge utilities it sums, for callers that want to
/// attribute changes to edges.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialState {
    pub edge_utilities: Vec<f64>,
    pub potential: f64,
}

impl PotentialState {
    pub fn compute(profile: &StrategyProfile, p: &Matrix) -> Self {
        let edge_utilities: Vec<f64> = profile.edges.iter().map(|e| e.utility(p)).collect();
        let potential = edge_utilities.iter().sum();
        Self { edge_utilities, potential }
    }
}

/// Which side of an edge moved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategySide {
    Request,
    Send,
}

/// Outcome of [`verify_potential_step`]: the potential change, the moving
/// edge's utility change, and which strategy moved (none for a no-op).
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialDelta {
    pub delta_potential: f64,
    pub delta_edge_utility: f64,
    pub changed: Option<(usize, StrategySide)>,
}

/// The executable form of the potential-game property: given two profiles
/// differing in at most one strategy side of one edge, returns both the
/// from-scratch potential change and that edge's utility change. For a
/// genuine potential these are equal (callers assert to 1e−12); profiles
/// differing in more than one strategy are rejected because the identity
/// is only claimed for unilateral deviations.
pub fn verify_potential_step(
    before: &StrategyProfile,
    after: &StrategyProfile,
    p: &Matrix,
) -> Result<PotentialDelta> {
    if before.edge_count() != after.edge_count() {
        return Err(Error::NotUnilateral(format!(
            "edge counts differ: {} vs {}",
            before.edge_count(),
            after.edge_count()
        )));
    }
    let mut changed = None;
    for e in 0..before.edge_count() {
        let (b, a) = (before.edge(e), after.edge(e));
        for (side, moved) in [
            (StrategySide::Request, b.request() != a.request()),
            (StrategySide::Send, b.send() != a.send()),
        ] {
            if !moved {
                continue;
            }
            if changed.is_some() {
                return Err(Error::NotUnilateral(format!(
                    "second change found at edge {e} ({side:?})"
                )));
            }
            changed = Some((e, side));
        }
    }
    let delta_potential = potential(after, p) - potential(before, p);
    let delta_edge_utility = match changed {
        Some((e, _)) => after.edge(e).utility(p) - before.edge(e).utility(p),
        None => 0.0,
    };
    Ok(PotentialDelta { delta_potential, delta_edge_utility, changed })
}

/// One asynchronous best-response sweep: for each edge in order, replace
/// the request side and then the sending side by pure best responses, but
/// only on strict payoff improvement so ties never cause churn. Returns
/// the number of strategies changed; zero means the profile is a Nash
/// fixed point of the frozen matrix.
pub fn best_response_sweep(profile: &mut StrategyProfile, p: &Matrix) -> usize {
    let m = p.size();
    let mut switches = 0;
    let mut payoffs = Vec::new();
    for e in 0..profile.edge_count() {
        let current = profile.edge(e).utility(p);
        p.mul_vec(profile.edge(e).send(), &mut payoffs);
        let s = argmax_ties(&payoffs)[0];
        if payoffs[s] > current {
            let mut w = vec![0.0; m];
            w[s] = 1.0;
            profile.edge_mut(e).set_request(w).expect("vertex is a valid strategy");
            switches += 1;
        }
        let current = profile.edge(e).utility(p);
        p.vec_mul(profile.edge(e).request(), &mut payoffs);
        let t = argmax_ties(&payoffs)[0];
        if payoffs[t] > current {
            let mut v = vec![0.0; m];
            v[t] = 1.0;
            profile.edge_mut(e).set_send(v).expect("vertex is a valid strategy");
            switches += 1;
        }
    }
    switches
}

/// Normalized histogram of a neighbor's observed shard choices, with a
/// pseudo-count prior. The default prior is one count per shard, so an
/// agent with no observations treats its neighbor as uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalEstimate {
    counts: Vec<u64>,
    prior: Vec<f64>,
}

impl EmpiricalEstimate {
    /// Uniform one-pseudo-count prior over `m` shards.
    pub fn new(m: usize) -> Self {
        Self { counts: vec![0; m], prior: vec![1.0; m] }
    }

    pub fn with_prior(prior: Vec<f64>) -> Self {
        Self { counts: vec![0; prior.len()], prior }
    }

    pub fn from_counts(counts: Vec<u64>, prior: Vec<f64>) -> Self {
        assert_eq!(counts.len(), prior.len());
        Self { counts, prior }
    }

    pub fn shard_count(&self) -> usize {
        self.counts.len()
    }

    pub fn observations(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Records one observed shard choice.
    pub fn observe(&mut self, shard: ShardId) {
        self.counts[shard.0] += 1;
    }

    /// The estimate vector `(counts + prior) / Σ(counts + prior)`.
    pub fn estimate(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.estimate_into(&mut out);
        out
    }

    pub fn estimate_into(&self, out: &mut Vec<f64>) {
        out.clear();
        let total: f64 =
            self.counts.iter().map(|c| *c as f64).sum::<f64>() + self.prior.iter().sum::<f64>();
        if total <= 0.0 {
            let m = self.counts.len();
            out.resize(m, 1.0 / m as f64);
            return;
        }
        out.extend(
            self.counts
                .iter()
                .zip(&self.prior)
                .map(|(c, p)| (*c as f64 + p) / total),
        );
    }

    /// Largest single entry of the estimate; near 1 once the neighbor has
    /// settled on one shard.
    pub fn top_mass(&self) -> f64 {
        self.estimate().into_iter().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn e(s: usize, m: usize) -> Vec<f64> {
        let mut v = vec![0.0; m];
        v[s] = 1.0;
        v
    }

    fn random_loading<R: Rng>(m: usize, rng: &mut R) -> Vec<f64> {
        let mut usage = vec![0.0; m];
        for _ in 0..30 {
            usage[rng.gen_range(0..m)] += 1.0 / 30.0;
        }
        usage.iter().map(|u| (u - 1.0 / m as f64).max(0.0)).collect()
    }

    fn random_simplex<R: Rng>(m: usize, rng: &mut R) -> Vec<f64> {
        let mut x: Vec<f64> = (0..m).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
        let sum: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= sum);
        x
    }

    #[test]
    fn request_response_follows_the_estimate() {
        // Idle shards, α = 1: the diagonal dominates, so the best request
        // shard is wherever the sender is expected to fund from.
        let p = Matrix::price(&[0.0; 4], 1.0);
        assert_eq!(best_response_request(&p, &e(2, 4)), ShardId(2));
        assert_eq!(best_response_send(&p, &e(1, 4)), ShardId(1));
    }

    #[test]
    fn all_ones_matrix_ties_everything_to_lowest_index() {
        let p = Matrix::ones(4);
        assert_eq!(best_response_request(&p, &[0.25; 4]), ShardId(0));
        assert_eq!(argmax_ties(&[1.0, 1.0, 1.0, 1.0]), vec![0, 1, 2, 3]);
        assert_eq!(mixed_best_response(&p, &[0.25; 4]), vec![0.25; 4]);
    }

    #[test]
    fn seeded_tie_break_spreads_over_ties() {
        let p = Matrix::ones(4);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let mut seen = [0u32; 4];
        for _ in 0..400 {
            let s = best_response_request_with(&p, &[0.25; 4], TieBreak::SeededRandom, &mut rng);
            seen[s.0] += 1;
        }
        // Uniform over 4 ties: each shard should appear roughly 100 times.
        for count in seen {
            assert!((60..=140).contains(&count), "tie-break skew: {seen:?}");
        }
        // Lowest-index mode never leaves shard 0.
        let s = best_response_request_with(&p, &[0.25; 4], TieBreak::LowestIndex, &mut rng);
        assert_eq!(s, ShardId(0));
    }

    #[test]
    fn send_response_maximizes_column_sums() {
        // Uniform ŵ over λ = (0,¼,¼,0), α = 1: column sums tie shards 0
        // and 3, lowest index wins.
        let p = Matrix::price(&[0.0, 0.25, 0.25, 0.0], 1.0);
        assert_eq!(best_response_send(&p, &[0.25; 4]), ShardId(0));
    }

    #[test]
    fn pure_response_matches_exhaustive_vertex_search() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..300 {
            let m = rng.gen_range(2..=8);
            let loading = random_loading(m, &mut rng);
            let alpha = rng.gen_range(0.0..2.0);
            let p = Matrix::price(&loading, alpha);
            let v_hat = random_simplex(m, &mut rng);
            let br = best_response_request(&p, &v_hat);
            let br_value = p.bilinear(&e(br.0, m), &v_hat);
            for s in 0..m {
                let value = p.bilinear(&e(s, m), &v_hat);
                assert!(value <= br_value + TIE_TOL);
            }
        }
    }

    #[test]
    fn pure_response_never_beaten_by_mixed_strategies() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..200 {
            let m = rng.gen_range(2..=8);
            let p = Matrix::price(&random_loading(m, &mut rng), rng.gen_range(0.0..2.0));
            let v_hat = random_simplex(m, &mut rng);
            let br = best_response_request(&p, &v_hat);
            let br_value = p.bilinear(&e(br.0, m), &v_hat);
            for _ in 0..100 {
                let w = random_simplex(m, &mut rng);
                assert!(p.bilinear(&w, &v_hat) <= br_value + TIE_TOL);
            }
        }
    }

    #[test]
    fn mixed_response_exposes_tie_structure() {
        // Symmetric loading on shards 0 and 3 with none elsewhere ties the
        // two idle shards 1 and 2 for a uniform sender estimate.
        let p = Matrix::price(&[0.1, 0.0, 0.0, 0.1], 1.0);
        let mixed = mixed_best_response(&p, &[0.25; 4]);
        assert_abs_diff_eq!(mixed[1], 0.5);
        assert_abs_diff_eq!(mixed[2], 0.5);
        assert_abs_diff_eq!(mixed[0] + mixed[3], 0.0);
        // Unique argmax collapses to the pure response.
        let p = Matrix::price(&[0.0, 0.2, 0.0, 0.0], 1.0);
        let mixed = mixed_best_response(&p, &e(0, 4));
        assert_eq!(mixed, e(0, 4));
    }

    #[test]
    fn estimates_start_uniform_and_track_observations() {
        let mut est = EmpiricalEstimate::new(4);
        assert_eq!(est.estimate(), vec![0.25; 4]);
        for _ in 0..3 {
            est.observe(ShardId(2));
        }
        let got = est.estimate();
        let want = [1.0 / 7.0, 1.0 / 7.0, 4.0 / 7.0, 1.0 / 7.0];
        for (g, w) in got.iter().zip(want) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(est.top_mass(), 4.0 / 7.0, epsilon = 1e-15);

        let sharp = EmpiricalEstimate::from_counts(vec![0, 5, 0, 0], vec![0.0; 4]);
        assert_eq!(sharp.estimate(), e(1, 4));
    }

    #[test]
    fn estimates_stay_on_simplex() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let mut est = EmpiricalEstimate::new(6);
        for _ in 0..1000 {
            est.observe(ShardId(rng.gen_range(0..6)));
            let v = est.estimate();
            assert_abs_diff_eq!(v.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            assert!(v.iter().all(|p| *p >= 0.0));
        }
    }

    #[test]
    fn potential_sums_edge_utilities() {
        let p = Matrix::price(&[0.0; 4], 1.0);
        let single = StrategyProfile::new(vec![EdgeStrategy::pure(ShardId(2), ShardId(2), 4)]);
        assert_abs_diff_eq!(potential(&single, &p), 1.0);
        // A ring of four matched deterministic pairs contributes 1 each.
        let ring = StrategyProfile::new(
            (0..4).map(|s| EdgeStrategy::pure(ShardId(s), ShardId(s), 4)).collect(),
        );
        assert_abs_diff_eq!(potential(&ring, &p), 4.0);
        let state = PotentialState::compute(&ring, &p);
        assert_eq!(state.edge_utilities.len(), 4);
        assert_abs_diff_eq!(state.potential, 4.0);
    }

    #[test]
    fn unilateral_step_moves_potential_by_edge_utility() {
        let p = Matrix::price(&[0.0; 4], 1.0);
        let before = StrategyProfile::new(vec![
            EdgeStrategy::pure(ShardId(1), ShardId(2), 4),
            EdgeStrategy::pure(ShardId(0), ShardId(0), 4),
        ]);
        let mut after = before.clone();
        after.edge_mut(0).set_request(e(2, 4)).unwrap();
        let delta = verify_potential_step(&before, &after, &p).unwrap();
        // Request e_1 → e_2 against v = e_2: utility ½ → 1.
        assert_abs_diff_eq!(delta.delta_potential, 0.5);
        assert_abs_diff_eq!(delta.delta_edge_utility, 0.5);
        assert_eq!(delta.changed, Some((0, StrategySide::Request)));

        let noop = verify_potential_step(&before, &before, &p).unwrap();
        assert_eq!(noop.delta_potential, 0.0);
        assert_eq!(noop.delta_edge_utility, 0.0);
        assert_eq!(noop.changed, None);

        let mut two_changes = after.clone();
        two_changes.edge_mut(1).set_send(e(3, 4)).unwrap();
        assert!(verify_potential_step(&before, &two_changes, &p).is_err());
    }

    #[test]
    fn potential_identity_on_random_unilateral_perturbations() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..1000 {
            let m = rng.gen_range(2..=8);
            let edges = rng.gen_range(1..=12);
            let p = Matrix::price(&random_loading(m, &mut rng), rng.gen_range(0.0..2.0));
            let before = StrategyProfile::new(
                (0..edges)
                    .map(|_| {
                        EdgeStrategy::new(random_simplex(m, &mut rng), random_simplex(m, &mut rng))
                            .unwrap()
                    })
                    .collect(),
            );
            let mut after = before.clone();
            let edge = rng.gen_range(0..edges);
            let replacement = random_simplex(m, &mut rng);
            if rng.gen_bool(0.5) {
                after.edge_mut(edge).set_request(replacement).unwrap();
            } else {
                after.edge_mut(edge).set_send(replacement).unwrap();
            }
            let delta = verify_potential_step(&before, &after, &p).unwrap();
            assert!(
                (delta.delta_potential - delta.delta_edge_utility).abs() <= 1e-12,
                "potential step mismatch: {} vs {}",
                delta.delta_potential,
                delta.delta_edge_utility
            );
        }
    }

    #[test]
    fn sweeps_climb_the_potential_to_a_fixed_point() {
        let mut rng = ChaCha12Rng::seed_from_u64(59);
        for _ in 0..50 {
            let m = rng.gen_range(2..=8);
            let edges = rng.gen_range(1..=40);
            let p = Matrix::price(&random_loading(m, &mut rng), rng.gen_range(0.0..1.5));
            let mut profile = StrategyProfile::new(
                (0..edges)
                    .map(|_| {
                        EdgeStrategy::new(random_simplex(m, &mut rng), random_simplex(m, &mut rng))
                            .unwrap()
                    })
                    .collect(),
            );
            let mut h = potential(&profile, &p);
            let mut converged = false;
            for _ in 0..10 {
                let switches = best_response_sweep(&mut profile, &p);
                let next = potential(&profile, &p);
                assert!(next >= h - 1e-9, "potential decreased: {h} -> {next}");
                h = next;
                if switches == 0 {
                    converged = true;
                    break;
                }
            }
            assert!(converged, "no fixed point within 10 sweeps");
            // At the fixed point no further sweep changes anything.
            assert_eq!(best_response_sweep(&mut profile, &p), 0);
        }
    }
}
