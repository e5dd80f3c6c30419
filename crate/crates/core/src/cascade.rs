//! Threshold-controlled activation dynamics.
//!
//! Every node is either inactive or active, and active nodes stay active.
//! An inactive node with `k > 0` neighbors, `a >= 1` of them active,
//! switches on when `a / k >= phi`. Nodes are updated either all at once
//! from the previous step's state (synchronous) or one at a time in a fresh
//! random order that sees earlier updates immediately (asynchronous).

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Network;

/// Default fraction of nodes a cascade must reach to count as global.
pub const DEFAULT_CUTOFF_FRACTION: f64 = 0.85;

/// Default step budget, in units of the node count.
pub const DEFAULT_MAX_STEPS_PER_NODE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    #[default]
    Synchronous,
    Asynchronous,
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schedule::Synchronous => "synchronous",
            Schedule::Asynchronous => "asynchronous",
        })
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "synchronous" | "sync" => Ok(Schedule::Synchronous),
            "asynchronous" | "async" => Ok(Schedule::Asynchronous),
            other => Err(Error::invalid(
                "schedule",
                format!("expected `synchronous` or `asynchronous`, got `{other}`"),
            )),
        }
    }
}

/// Which nodes are switched on at `t = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSpec {
    /// One node chosen uniformly at random.
    #[default]
    SingleNode,
    /// A random node of degree >= 2 together with two of its neighbors.
    ConnectedTriple,
    /// Fixed node ids.
    Explicit(Vec<usize>),
}

impl fmt::Display for SeedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedSpec::SingleNode => f.write_str("single"),
            SeedSpec::ConnectedTriple => f.write_str("triple"),
            SeedSpec::Explicit(ids) => {
                let ids: Vec<String> = ids.iter().map(usize::to_string).collect();
                write!(f, "[{}]", ids.join(" "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeParams {
    pub phi: f64,
    pub schedule: Schedule,
    pub seed: SeedSpec,
    pub cutoff_fraction: f64,
    /// Step budget; `None` means `10 * N`.
    pub max_steps: Option<usize>,
}

impl Default for CascadeParams {
    fn default() -> Self {
        CascadeParams {
            phi: 0.0,
            schedule: Schedule::Synchronous,
            seed: SeedSpec::SingleNode,
            cutoff_fraction: DEFAULT_CUTOFF_FRACTION,
            max_steps: None,
        }
    }
}

impl CascadeParams {
    pub fn new(phi: f64) -> Self {
        CascadeParams {
            phi,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.phi) {
            return Err(Error::invalid("phi", format!("must lie in [0, 1], got {}", self.phi)));
        }
        if !(self.cutoff_fraction > 0.0 && self.cutoff_fraction <= 1.0) {
            return Err(Error::invalid(
                "cutoff_fraction",
                format!("must lie in (0, 1], got {}", self.cutoff_fraction),
            ));
        }
        if self.max_steps == Some(0) {
            return Err(Error::invalid("max_steps", "must be at least 1"));
        }
        Ok(())
    }

    pub fn step_budget(&self, n: usize) -> usize {
        self.max_steps
            .unwrap_or(DEFAULT_MAX_STEPS_PER_NODE * n)
            .max(1)
    }
}

/// The threshold rule.
///
/// Isolated nodes never activate, and a node needs at least one active
/// neighbor: with `phi = 0` the rule reduces to plain flooding.
pub fn activation_rule(active_neighbors: usize, degree: usize, phi: f64) -> Result<bool> {
    if active_neighbors > degree {
        return Err(Error::invalid(
            "active_neighbors",
            format!("{active_neighbors} active neighbors exceeds degree {degree}"),
        ));
    }
    Ok(rule(active_neighbors, degree, phi))
}

#[inline]
fn rule(active: usize, degree: usize, phi: f64) -> bool {
    active > 0 && active as f64 / degree as f64 >= phi
}

/// Cascade state after `t` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeState {
    active: Vec<bool>,
    t: usize,
    newly_activated: Vec<usize>,
    active_count: usize,
    active_neighbors: Vec<u32>,
}

impl CascadeState {
    /// State at `t = 0` with `seeds` switched on.
    pub fn new(net: &Network, seeds: &[usize]) -> Result<Self> {
        let n = net.node_count();
        let mut state = CascadeState {
            active: vec![false; n],
            t: 0,
            newly_activated: Vec::with_capacity(seeds.len()),
            active_count: 0,
            active_neighbors: vec![0; n],
        };
        for &s in seeds {
            if s >= n {
                return Err(Error::invalid("seed", format!("node {s} out of range for {n} nodes")));
            }
            if !state.active[s] {
                state.switch_on(net, s);
                state.newly_activated.push(s);
            }
        }
        state.newly_activated.sort_unstable();
        Ok(state)
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn is_active(&self, v: usize) -> bool {
        self.active[v]
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Nodes switched on by the most recent step (the seeds at `t = 0`).
    pub fn newly_activated(&self) -> &[usize] {
        &self.newly_activated
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    pub fn active_fraction(&self) -> f64 {
        self.active_count as f64 / self.active.len() as f64
    }

    #[inline]
    fn switch_on(&mut self, net: &Network, v: usize) {
        self.active[v] = true;
        self.active_count += 1;
        let (local, long) = net.neighbor_slices(v);
        for &u in local.iter().chain(long) {
            self.active_neighbors[u as usize] += 1;
        }
    }

    /// One synchronous step in place.
    pub fn advance_synchronous(&mut self, net: &Network, phi: f64) {
        // Only neighbors of the last step's activations saw their active
        // count change; every other inactive node already failed the rule.
        let mut candidates: Vec<usize> = Vec::new();
        for &v in &self.newly_activated {
            let (local, long) = net.neighbor_slices(v);
            for &u in local.iter().chain(long) {
                let u = u as usize;
                if !self.active[u] {
                    candidates.push(u);
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        candidates.retain(|&u| rule(self.active_neighbors[u] as usize, net.degree(u), phi));
        for &u in &candidates {
            self.switch_on(net, u);
        }
        self.newly_activated = candidates;
        self.t += 1;
    }

    /// One asynchronous sweep in place, visiting nodes in the given order.
    fn advance_in_order(&mut self, net: &Network, phi: f64, order: &[usize]) {
        let mut fresh = Vec::new();
        for &v in order {
            if !self.active[v] && rule(self.active_neighbors[v] as usize, net.degree(v), phi) {
                self.switch_on(net, v);
                fresh.push(v);
            }
        }
        fresh.sort_unstable();
        self.newly_activated = fresh;
        self.t += 1;
    }

    /// One asynchronous sweep in place: all nodes in a fresh random order.
    pub fn advance_asynchronous<R: Rng + ?Sized>(&mut self, net: &Network, phi: f64, rng: &mut R) {
        let mut order: Vec<usize> = (0..net.node_count()).collect();
        order.shuffle(rng);
        self.advance_in_order(net, phi, &order);
    }
}

/// Synchronous update: every inactive node is judged against the previous
/// step's active set.
pub fn step_synchronous(net: &Network, state: &CascadeState, phi: f64) -> CascadeState {
    let mut next = state.clone();
    next.advance_synchronous(net, phi);
    next
}

/// Asynchronous update: one full random-permutation sweep; a node sees
/// activations made earlier in the same sweep.
pub fn step_asynchronous<R: Rng + ?Sized>(
    net: &Network,
    state: &CascadeState,
    phi: f64,
    rng: &mut R,
) -> CascadeState {
    let mut next = state.clone();
    next.advance_asynchronous(net, phi, rng);
    next
}

/// Picks the initial active set.
pub fn select_seed<R: Rng + ?Sized>(net: &Network, spec: &SeedSpec, rng: &mut R) -> Result<Vec<usize>> {
    let n = net.node_count();
    match spec {
        SeedSpec::SingleNode => Ok(vec![rng.random_range(0..n)]),
        SeedSpec::ConnectedTriple => {
            let pick = |hub: usize, rng: &mut R| {
                let nbrs: Vec<usize> = net.neighbors(hub).collect();
                let chosen = index::sample(rng, nbrs.len(), 2);
                let mut seed = vec![hub, nbrs[chosen.index(0)], nbrs[chosen.index(1)]];
                seed.sort_unstable();
                seed
            };
            for _ in 0..n {
                let hub = rng.random_range(0..n);
                if net.degree(hub) >= 2 {
                    return Ok(pick(hub, rng));
                }
            }
            // Sparse graph: fall back to picking among eligible hubs directly.
            let eligible: Vec<usize> = (0..n).filter(|&v| net.degree(v) >= 2).collect();
            match eligible.choose(rng) {
                Some(&hub) => Ok(pick(hub, rng)),
                None => Err(Error::InfeasibleSeed(
                    "no node has two neighbors to form a connected triple".into(),
                )),
            }
        }
        SeedSpec::Explicit(ids) => {
            if ids.is_empty() {
                return Err(Error::InfeasibleSeed("explicit seed set is empty".into()));
            }
            let mut sorted = ids.clone();
            sorted.sort_unstable();
            if let Some(&bad) = sorted.iter().find(|&&v| v >= n) {
                return Err(Error::InfeasibleSeed(format!("node {bad} out of range for {n} nodes")));
            }
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InfeasibleSeed("explicit seed set has duplicates".into()));
            }
            Ok(ids.clone())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeOutcome {
    pub final_fraction: f64,
    pub active_count: usize,
    /// Step of the last activation: the fixed point is in place from here on.
    pub time: usize,
    /// First step at which the active fraction reached the cutoff.
    pub time_to_cutoff: Option<usize>,
    pub is_global: bool,
    /// The step budget ran out while nodes were still switching on.
    pub stalled: bool,
    /// Step at which each node switched on (`Some(0)` for seeds).
    pub activation_time: Vec<Option<usize>>,
    pub seed: Vec<usize>,
}

impl CascadeOutcome {
    /// Active set after `t` steps, reconstructed from activation times.
    pub fn active_at(&self, t: usize) -> Vec<bool> {
        self.activation_time
            .iter()
            .map(|a| matches!(a, Some(s) if *s <= t))
            .collect()
    }

    pub fn is_activated(&self, v: usize) -> bool {
        self.activation_time[v].is_some()
    }
}

/// Seeds the network and runs until no node switches on (or the step
/// budget runs out).
pub fn run_cascade<R: Rng + ?Sized>(net: &Network, params: &CascadeParams, rng: &mut R) -> Result<CascadeOutcome> {
    params.validate()?;
    let seed = select_seed(net, &params.seed, rng)?;
    run_from_seed(net, params, seed, rng)
}

/// Like [`run_cascade`] with the seed set already chosen; `rng` only drives
/// the asynchronous update order.
pub fn run_from_seed<R: Rng + ?Sized>(
    net: &Network,
    params: &CascadeParams,
    seed: Vec<usize>,
    rng: &mut R,
) -> Result<CascadeOutcome> {
    params.validate()?;
    let n = net.node_count();
    let budget = params.step_budget(n);
    let mut state = CascadeState::new(net, &seed)?;
    let mut activation_time = vec![None; n];
    for &s in state.newly_activated() {
        activation_time[s] = Some(0);
    }
    let reached = |count: usize| count as f64 / n as f64 >= params.cutoff_fraction;
    let mut time_to_cutoff = reached(state.active_count()).then_some(0);
    let mut time = 0;
    let mut stalled = false;

    while state.t() < budget {
        let before = state.active_count();
        match params.schedule {
            Schedule::Synchronous => state.advance_synchronous(net, params.phi),
            Schedule::Asynchronous => state.advance_asynchronous(net, params.phi, rng),
        }
        debug_assert!(state.active_count() >= before);
        if state.newly_activated().is_empty() {
            break;
        }
        time = state.t();
        for &v in state.newly_activated() {
            activation_time[v] = Some(time);
        }
        if time_to_cutoff.is_none() && reached(state.active_count()) {
            time_to_cutoff = Some(time);
        }
        stalled = state.t() == budget;
    }

    let final_fraction = state.active_fraction();
    Ok(CascadeOutcome {
        final_fraction,
        active_count: state.active_count(),
        time,
        time_to_cutoff,
        is_global: !stalled && final_fraction >= params.cutoff_fraction,
        stalled,
        activation_time,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeSet, VecDeque};

    fn star() -> Network {
        Network::from_topology(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap()
    }

    fn path3() -> Network {
        Network::from_topology(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn active_set(state: &CascadeState) -> Vec<usize> {
        (0..state.active().len()).filter(|&v| state.is_active(v)).collect()
    }

    #[test]
    fn rule_examples() {
        assert!(activation_rule(2, 10, 0.15).unwrap());
        assert!(!activation_rule(1, 10, 0.15).unwrap());
        assert!(!activation_rule(0, 0, 0.15).unwrap());
        assert!(!activation_rule(0, 0, 0.0).unwrap());
        assert!(!activation_rule(0, 4, 0.0).unwrap());
        assert!(activation_rule(3, 20, 0.15).unwrap());
        assert!(activation_rule(3, 3, 1.0).unwrap());
        assert!(!activation_rule(2, 3, 1.0).unwrap());
        assert!(activation_rule(11, 10, 0.1).is_err());
    }

    #[test]
    fn sync_star_wakes_all_leaves() {
        let net = star();
        let s0 = CascadeState::new(&net, &[0]).unwrap();
        let s1 = step_synchronous(&net, &s0, 0.5);
        assert_eq!(s1.t(), 1);
        assert_eq!(s1.active_count(), 5);
        assert_eq!(s1.newly_activated(), &[1, 2, 3, 4]);
    }

    #[test]
    fn sync_path_stalls_above_half() {
        let net = path3();
        let s0 = CascadeState::new(&net, &[0]).unwrap();
        let s1 = step_synchronous(&net, &s0, 0.6);
        assert_eq!(active_set(&s1), vec![0]);
        assert!(s1.newly_activated().is_empty());

        let out = run_cascade(&net, &CascadeParams { seed: SeedSpec::Explicit(vec![0]), ..CascadeParams::new(0.6) }, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(out.active_count, 1);
        assert_eq!(out.time, 0);
        assert!(!out.is_global);
    }

    #[test]
    fn sync_path_is_one_hop_per_step() {
        let net = path3();
        let s1 = step_synchronous(&net, &CascadeState::new(&net, &[0]).unwrap(), 0.5);
        assert_eq!(active_set(&s1), vec![0, 1]);
        let s2 = step_synchronous(&net, &s1, 0.5);
        assert_eq!(active_set(&s2), vec![0, 1, 2]);
    }

    #[test]
    fn all_active_is_absorbing() {
        let net = star();
        let full = CascadeState::new(&net, &[0, 1, 2, 3, 4]).unwrap();
        let s = step_synchronous(&net, &full, 0.3);
        assert_eq!(s.active(), full.active());
        assert_eq!(s.t(), 1);
        let a = step_asynchronous(&net, &full, 0.3, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a.active(), full.active());
    }

    #[test]
    fn async_sweep_sees_fresh_activations() {
        let net = path3();
        let mut s = CascadeState::new(&net, &[0]).unwrap();
        s.advance_in_order(&net, 0.5, &[1, 2, 0]);
        assert_eq!(s.active_count(), 3);
        assert_eq!(s.t(), 1);

        // c visited before b: only b switches on in this sweep
        let mut s = CascadeState::new(&net, &[0]).unwrap();
        s.advance_in_order(&net, 0.5, &[2, 1, 0]);
        assert_eq!(active_set(&s), vec![0, 1]);
    }

    #[test]
    fn async_star_any_order() {
        let net = star();
        for seed in 0..20 {
            let s0 = CascadeState::new(&net, &[0]).unwrap();
            let s1 = step_asynchronous(&net, &s0, 0.5, &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(s1.active_count(), 5);
        }
    }

    #[test]
    fn unit_threshold_on_triangle() {
        let net = Network::from_topology(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let params = |s: Vec<usize>| CascadeParams { seed: SeedSpec::Explicit(s), ..CascadeParams::new(1.0) };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let two = run_cascade(&net, &params(vec![0, 1]), &mut rng).unwrap();
        assert_eq!(two.active_count, 3);
        let one = run_cascade(&net, &params(vec![0]), &mut rng).unwrap();
        assert_eq!(one.active_count, 1);
    }

    #[test]
    fn isolated_nodes_stay_off() {
        let net = Network::from_topology(3, &[(0, 1)]).unwrap();
        let p = CascadeParams { seed: SeedSpec::Explicit(vec![0]), ..CascadeParams::new(0.0) };
        let out = run_cascade(&net, &p, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(out.activation_time, vec![Some(0), Some(1), None]);
    }

    #[test]
    fn single_seed_has_one_node() {
        let net = Network::from_topology(10, &[]).unwrap();
        let s = select_seed(&net, &SeedSpec::SingleNode, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0] < 10);
    }

    #[test]
    fn triple_on_star_uses_center() {
        let net = star();
        // every valid triple: the center plus two distinct leaves
        let mut valid = BTreeSet::new();
        for a in 1..5 {
            for b in a + 1..5 {
                valid.insert(vec![0, a, b]);
            }
        }
        let mut seen = BTreeSet::new();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let s = select_seed(&net, &SeedSpec::ConnectedTriple, &mut rng).unwrap();
            assert!(valid.contains(&s), "{s:?}");
            seen.insert(s);
        }
        assert_eq!(seen, valid);
    }

    #[test]
    fn triple_needs_a_hub() {
        let net = Network::from_topology(4, &[(0, 1), (2, 3)]).unwrap();
        let err = select_seed(&net, &SeedSpec::ConnectedTriple, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, Error::InfeasibleSeed(_)));

        // one hub among many isolated nodes is still found
        let mut edges = vec![(0, 1), (0, 2)];
        edges.push((3, 4));
        let net = Network::from_topology(200, &edges).unwrap();
        let s = select_seed(&net, &SeedSpec::ConnectedTriple, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(s, vec![0, 1, 2]);
    }

    #[test]
    fn explicit_seed_passthrough() {
        let net = star();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_seed(&net, &SeedSpec::Explicit(vec![0, 1, 2]), &mut rng).unwrap(), vec![0, 1, 2]);
        assert!(select_seed(&net, &SeedSpec::Explicit(vec![7]), &mut rng).is_err());
        assert!(select_seed(&net, &SeedSpec::Explicit(vec![1, 1]), &mut rng).is_err());
        assert!(select_seed(&net, &SeedSpec::Explicit(vec![]), &mut rng).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(CascadeParams::new(1.5).validate().is_err());
        assert!(CascadeParams::new(-0.1).validate().is_err());
        assert!(CascadeParams { cutoff_fraction: 0.0, ..CascadeParams::new(0.1) }.validate().is_err());
        assert!(CascadeParams { max_steps: Some(0), ..CascadeParams::new(0.1) }.validate().is_err());
        assert_eq!(CascadeParams::new(0.1).step_budget(100), 1000);
    }

    #[test]
    fn step_budget_marks_stall() {
        let edges: Vec<_> = (0..9).map(|i| (i, i + 1)).collect();
        let net = Network::from_topology(10, &edges).unwrap();
        let p = CascadeParams {
            seed: SeedSpec::Explicit(vec![0]),
            max_steps: Some(3),
            cutoff_fraction: 0.1,
            ..CascadeParams::new(0.0)
        };
        let out = run_cascade(&net, &p, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(out.time, 3);
        assert!(out.stalled);
        assert!(!out.is_global);
        assert_eq!(out.active_count, 4);
    }

    #[test]
    fn time_to_cutoff_and_snapshots() {
        let edges: Vec<_> = (0..9).map(|i| (i, i + 1)).collect();
        let net = Network::from_topology(10, &edges).unwrap();
        let p = CascadeParams { seed: SeedSpec::Explicit(vec![0]), cutoff_fraction: 0.5, ..CascadeParams::new(0.0) };
        let out = run_cascade(&net, &p, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(out.time, 9);
        assert_eq!(out.time_to_cutoff, Some(4));
        assert!(out.is_global);
        assert_eq!(out.active_at(0).iter().filter(|&&a| a).count(), 1);
        assert_eq!(out.active_at(4).iter().filter(|&&a| a).count(), 5);
    }

    fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Network {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        Network::from_topology(n, &edges).unwrap()
    }

    fn bfs_ecc(net: &Network, s: usize) -> (BTreeSet<usize>, usize) {
        let mut dist = vec![usize::MAX; net.node_count()];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        let mut ecc = 0;
        while let Some(u) = q.pop_front() {
            ecc = ecc.max(dist[u]);
            for v in net.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
        ((0..net.node_count()).filter(|&v| dist[v] != usize::MAX).collect(), ecc)
    }

    #[test]
    fn zero_threshold_floods_component() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let net = random_graph(30, 0.08, &mut rng);
            let s = rng.random_range(0..30);
            let p = CascadeParams { seed: SeedSpec::Explicit(vec![s]), cutoff_fraction: 1.0, ..CascadeParams::new(0.0) };
            let out = run_cascade(&net, &p, &mut rng).unwrap();
            let (comp, ecc) = bfs_ecc(&net, s);
            let got: BTreeSet<_> = (0..30).filter(|&v| out.is_activated(v)).collect();
            assert_eq!(got, comp);
            assert_eq!(out.time, ecc);
        }
    }

    proptest! {
        #[test]
        fn sync_seed_monotone(gseed in any::<u64>(), phi in 0.0f64..=1.0, n in 2usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(gseed);
            let net = random_graph(n, 0.4, &mut rng);
            let small: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < 0.3).collect();
            let mut big = small.clone();
            big.extend((0..n).filter(|v| !small.contains(v) && rng.random::<f64>() < 0.3));
            prop_assume!(!small.is_empty());
            let run = |s: Vec<usize>| {
                let p = CascadeParams { seed: SeedSpec::Explicit(s), ..CascadeParams::new(phi) };
                run_cascade(&net, &p, &mut ChaCha8Rng::seed_from_u64(0)).unwrap()
            };
            let (a, b) = (run(small), run(big));
            for v in 0..n {
                prop_assert!(!a.is_activated(v) || b.is_activated(v));
            }
        }

        #[test]
        fn sync_runs_are_deterministic(gseed in any::<u64>(), phi in 0.0f64..0.6) {
            let mut rng = ChaCha8Rng::seed_from_u64(gseed);
            let net = random_graph(25, 0.15, &mut rng);
            let p = CascadeParams { seed: SeedSpec::Explicit(vec![0, 1]), ..CascadeParams::new(phi) };
            let a = run_cascade(&net, &p, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
            let b = run_cascade(&net, &p, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn active_set_grows(gseed in any::<u64>(), phi in 0.0f64..0.6, async_ in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(gseed);
            let net = random_graph(25, 0.2, &mut rng);
            let mut state = CascadeState::new(&net, &[0]).unwrap();
            for _ in 0..10 {
                let prev = state.clone();
                if async_ {
                    state.advance_asynchronous(&net, phi, &mut rng);
                } else {
                    state.advance_synchronous(&net, phi);
                }
                for v in 0..25 {
                    prop_assert!(!prev.is_active(v) || state.is_active(v));
                }
                prop_assert_eq!(state.active_count(), prev.active_count() + state.newly_activated().len());
            }
        }
    }
}
