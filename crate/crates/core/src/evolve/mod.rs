//! Discrete-time simulator of the clustered local-world growth model.
//!
//! Each step one node arrives: a cluster node with probability `p`, a normal
//! node otherwise. It links to a single cluster node drawn from a random local
//! world of `M` cluster nodes, preferring high degree (cluster newcomers) or a
//! high count of cluster-to-cluster edges (normal newcomers), damped by the
//! target's saturation `1 - k/kmax`. After attaching, on average `z` links are
//! removed, biased toward low-energy endpoints.

mod histogram;
mod sampler;
mod snapshot;

use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};

pub use histogram::{DegreeHistogram, KindFilter};
pub use snapshot::{read_snapshots, run, write_snapshots, SnapshotRecord, Trajectory};

use sampler::{IndexedSet, WeightTree};

/// Local-world attempts before falling back to the least-saturated node.
const MAX_LOCAL_WORLD_ATTEMPTS: usize = 8;

/// Full invariant sweep interval used by [`EvolvingNetwork::run_checked`].
const FULL_CHECK_INTERVAL: u64 = 250;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Cluster,
    Normal,
}

/// Constants of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    /// Seed cluster nodes.
    pub m0: usize,
    /// Local-world size `M`; values at or above the cluster count mean the
    /// whole cluster set.
    pub local_world: usize,
    /// Probability that a newcomer is a cluster node.
    pub p: f64,
    /// Expected link deletions per added link.
    pub z: f64,
    /// Degree-cap scale; node `i` may hold `floor(k_max E_i / E_max)` edges.
    pub k_max: u32,
    pub e_min: f64,
    pub e_max: f64,
    /// Links among the seed nodes.
    pub initial_edges: usize,
    pub seed: u64,
    /// Accept `0 < p < 1` instead of the model range `0 < p < 0.5`.
    #[serde(default)]
    pub relaxed: bool,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        Self {
            m0: 5,
            local_world: 4,
            p: 0.3,
            z: 0.0,
            k_max: 20,
            e_min: 0.5,
            e_max: 1.0,
            initial_edges: 4,
            seed: 0,
            relaxed: false,
        }
    }
}

impl EvolutionParams {
    pub fn validate(&self) -> Result<()> {
        let p_ok = if self.relaxed {
            self.p > 0.0 && self.p < 1.0
        } else {
            self.p > 0.0 && self.p < 0.5
        };
        if !p_ok {
            return Err(config(format!(
                "p = {} outside {}",
                self.p,
                if self.relaxed { "(0, 1)" } else { "(0, 0.5)" }
            )));
        }
        if !(self.z >= 0.0 && self.z.is_finite()) {
            return Err(config(format!("z = {} must be a finite value >= 0", self.z)));
        }
        if !(self.e_min > 0.0 && self.e_min < self.e_max) {
            return Err(config(format!(
                "energy interval [{}, {}] is empty or non-positive",
                self.e_min, self.e_max
            )));
        }
        if self.m0 == 0 {
            return Err(config("m0 must be at least 1"));
        }
        if self.local_world == 0 {
            return Err(config("local world size must be at least 1"));
        }
        if self.k_max < 2 {
            return Err(config("k_max must be at least 2"));
        }
        let pairs = self.m0 * (self.m0 - 1) / 2;
        if self.initial_edges > pairs {
            return Err(config(format!(
                "{} initial edges requested but only {pairs} pairs exist among {} nodes",
                self.initial_edges, self.m0
            )));
        }
        Ok(())
    }

    /// Edge cap of a cluster node with energy `e`.
    pub fn capacity(&self, energy: f64) -> u32 {
        ((self.k_max as f64 * energy / self.e_max).floor() as u32).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    pub kind: NodeKind,
    /// Initial energy; only cluster nodes carry one.
    pub energy: Option<f64>,
    /// Edge cap; always 1 for normal nodes.
    pub kmax: u32,
    pub degree: u32,
    /// Edges whose both endpoints are cluster nodes.
    pub cluster_edges: u32,
    pub birth: u64,
}

impl NodeState {
    pub fn is_saturated(&self) -> bool {
        self.degree >= self.kmax
    }

    fn saturation_factor(&self) -> f64 {
        1.0 - self.degree as f64 / self.kmax as f64
    }

    /// Attachment score before division by the local-world sum.
    fn raw_weight(&self, newcomer: NodeKind) -> f64 {
        let quantity = match newcomer {
            NodeKind::Cluster => self.degree,
            NodeKind::Normal => self.cluster_edges,
        };
        (self.saturation_factor() * quantity as f64).max(0.0)
    }

    fn attach_quantity(&self, newcomer: NodeKind) -> u32 {
        match newcomer {
            NodeKind::Cluster => self.degree,
            NodeKind::Normal => self.cluster_edges,
        }
    }
}

/// Attachment weight of `target` for a newcomer of the given kind.
///
/// Cluster newcomers use `(1 - k_i/kmax_i) k_i / Σ_local k_j`, normal
/// newcomers `(1 - k_i/kmax_i) c_i / Σ_local c_j`. A zero local sum yields 0.
pub fn attach_weight(target: &NodeState, newcomer: NodeKind, local_world: &[&NodeState]) -> f64 {
    let sum: u64 = local_world
        .iter()
        .map(|n| n.attach_quantity(newcomer) as u64)
        .sum();
    if sum == 0 {
        return 0.0;
    }
    target.raw_weight(newcomer) / sum as f64
}

/// Attachment weights renormalised to a sampling distribution over the local
/// world, or `None` when every weight is zero.
pub fn attach_probabilities(local_world: &[&NodeState], newcomer: NodeKind) -> Option<Vec<f64>> {
    let weights: Vec<f64> = local_world
        .iter()
        .map(|n| attach_weight(n, newcomer, local_world))
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    Some(weights.into_iter().map(|w| w / total).collect())
}

/// How the attachment target of a step was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttachRoute {
    /// Drawn by the renormalised preferential weights.
    Preferential,
    /// All weights were zero; uniform over unsaturated local-world members.
    UniformUnsaturated,
    /// Every sampled local world was saturated; globally least-saturated node.
    LeastSaturated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// Time after the step.
    pub t: u64,
    pub newcomer: usize,
    pub kind: NodeKind,
    pub target: usize,
    pub route: AttachRoute,
    pub deletions: usize,
    /// Normal nodes that lost their only link during this step.
    pub orphaned: Vec<usize>,
    /// Every node whose state changed.
    pub touched: Vec<usize>,
}

/// Cumulative counters of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvolutionStats {
    pub additions: u64,
    pub deletions: u64,
    pub deletion_attempts: u64,
    pub uniform_fallbacks: u64,
    pub global_fallbacks: u64,
    pub cluster_newcomers: u64,
    pub normal_newcomers: u64,
}

/// The growing network, its parameters and its random stream.
#[derive(Debug, Clone)]
pub struct EvolvingNetwork {
    params: EvolutionParams,
    nodes: Vec<NodeState>,
    adj: Vec<Vec<usize>>,
    t: u64,
    rng: ChaCha8Rng,
    /// Cluster node ids in arrival order; position = cluster ordinal.
    clusters: Vec<usize>,
    ordinal: Vec<usize>,
    degree_weights: WeightTree,
    cluster_edge_weights: WeightTree,
    unsaturated: IndexedSet,
    with_cluster_edges: IndexedSet,
    with_edges: IndexedSet,
    orphans: BTreeSet<usize>,
    stats: EvolutionStats,
}

const NOT_CLUSTER: usize = usize::MAX;

impl EvolvingNetwork {
    /// Seed network of `m0` cluster nodes joined by `initial_edges` random
    /// links. When at least `m0 - 1` links are requested the first `m0 - 1`
    /// form a random spanning tree.
    pub fn init(params: EvolutionParams) -> Result<Self> {
        params.validate()?;
        let mut net = Self {
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            params,
            nodes: Vec::new(),
            adj: Vec::new(),
            t: 0,
            clusters: Vec::new(),
            ordinal: Vec::new(),
            degree_weights: WeightTree::default(),
            cluster_edge_weights: WeightTree::default(),
            unsaturated: IndexedSet::default(),
            with_cluster_edges: IndexedSet::default(),
            with_edges: IndexedSet::default(),
            orphans: BTreeSet::new(),
            stats: EvolutionStats::default(),
        };
        for _ in 0..net.params.m0 {
            net.push_cluster_node();
        }
        net.link_seed_nodes()?;
        Ok(net)
    }

    fn link_seed_nodes(&mut self) -> Result<()> {
        let m0 = self.params.m0;
        let wanted = self.params.initial_edges;
        let mut placed = 0;
        if wanted >= m0.saturating_sub(1) {
            for i in 1..m0 {
                let open: Vec<usize> = (0..i).filter(|&j| !self.nodes[j].is_saturated()).collect();
                if open.is_empty() || self.nodes[i].is_saturated() {
                    return Err(config("seed nodes' capacities cannot hold a spanning tree"));
                }
                let j = open[self.rng.gen_range(0..open.len())];
                self.add_edge(i, j);
                placed += 1;
            }
        }
        if placed < wanted {
            let mut pairs: Vec<(usize, usize)> = (0..m0)
                .flat_map(|i| (i + 1..m0).map(move |j| (i, j)))
                .filter(|&(i, j)| !self.adj[i].contains(&j))
                .collect();
            // Fisher-Yates over the unused pairs.
            for i in (1..pairs.len()).rev() {
                let j = self.rng.gen_range(0..=i);
                pairs.swap(i, j);
            }
            for (i, j) in pairs {
                if placed == wanted {
                    break;
                }
                if !self.nodes[i].is_saturated() && !self.nodes[j].is_saturated() {
                    self.add_edge(i, j);
                    placed += 1;
                }
            }
        }
        if placed < wanted {
            return Err(config(format!(
                "only {placed} of {wanted} initial edges fit under the seed nodes' caps"
            )));
        }
        Ok(())
    }

    pub fn params(&self) -> &EvolutionParams {
        &self.params
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NodeState {
        &self.nodes[id]
    }

    pub fn neighbors(&self, id: usize) -> &[usize] {
        &self.adj[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_ids(&self) -> &[usize] {
        &self.clusters
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn stats(&self) -> &EvolutionStats {
        &self.stats
    }

    pub fn orphans(&self) -> &BTreeSet<usize> {
        &self.orphans
    }

    /// Sorted edge list `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    fn push_cluster_node(&mut self) -> usize {
        let energy = self.rng.gen_range(self.params.e_min..=self.params.e_max);
        let id = self.nodes.len();
        self.nodes.push(NodeState {
            kind: NodeKind::Cluster,
            energy: Some(energy),
            kmax: self.params.capacity(energy),
            degree: 0,
            cluster_edges: 0,
            birth: self.t,
        });
        self.adj.push(Vec::new());
        self.ordinal.push(self.clusters.len());
        self.clusters.push(id);
        self.degree_weights.push(0.0);
        self.cluster_edge_weights.push(0.0);
        self.unsaturated.insert(id);
        id
    }

    fn push_normal_node(&mut self) -> usize {
        let id = self.nodes.len();
        self.nodes.push(NodeState {
            kind: NodeKind::Normal,
            energy: None,
            kmax: 1,
            degree: 0,
            cluster_edges: 0,
            birth: self.t,
        });
        self.adj.push(Vec::new());
        self.ordinal.push(NOT_CLUSTER);
        id
    }

    /// Recompute the sampling weights and set memberships of a cluster node.
    fn refresh(&mut self, id: usize) {
        let ord = self.ordinal[id];
        if ord == NOT_CLUSTER {
            return;
        }
        let node = &self.nodes[id];
        let wk = node.raw_weight(NodeKind::Cluster);
        let wc = node.raw_weight(NodeKind::Normal);
        let unsat = !node.is_saturated();
        let has_c = node.cluster_edges > 0;
        let has_e = node.degree > 0;
        self.degree_weights.set(ord, wk);
        self.cluster_edge_weights.set(ord, wc);
        self.unsaturated.set(id, unsat);
        self.with_cluster_edges.set(id, has_c);
        self.with_edges.set(id, has_e);
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && !self.adj[u].contains(&v));
        self.adj[u].push(v);
        self.adj[v].push(u);
        let both_cluster =
            self.nodes[u].kind == NodeKind::Cluster && self.nodes[v].kind == NodeKind::Cluster;
        for w in [u, v] {
            self.nodes[w].degree += 1;
            if both_cluster {
                self.nodes[w].cluster_edges += 1;
            }
        }
        self.refresh(u);
        self.refresh(v);
    }

    fn remove_edge(&mut self, u: usize, v: usize) {
        let both_cluster =
            self.nodes[u].kind == NodeKind::Cluster && self.nodes[v].kind == NodeKind::Cluster;
        for (a, b) in [(u, v), (v, u)] {
            let pos = self.adj[a]
                .iter()
                .position(|&x| x == b)
                .expect("edge present on both endpoints");
            self.adj[a].swap_remove(pos);
            self.nodes[a].degree -= 1;
            if both_cluster {
                self.nodes[a].cluster_edges -= 1;
            }
        }
        self.refresh(u);
        self.refresh(v);
    }

    /// `min(M, cluster count)` distinct cluster nodes drawn uniformly without
    /// replacement.
    pub fn select_local_world(&mut self) -> Result<Vec<usize>> {
        let n = self.clusters.len();
        if n == 0 {
            return Err(Error::Structural("no cluster nodes to form a local world".into()));
        }
        if self.params.local_world >= n {
            return Ok(self.clusters.clone());
        }
        Ok(index::sample(&mut self.rng, n, self.params.local_world)
            .into_iter()
            .map(|i| self.clusters[i])
            .collect())
    }

    fn choose_target(&mut self, kind: NodeKind) -> Result<(usize, AttachRoute)> {
        if self.clusters.is_empty() {
            return Err(Error::Structural("no cluster nodes to attach to".into()));
        }
        if self.params.local_world >= self.clusters.len() {
            return self.choose_in_whole_network(kind);
        }
        for _ in 0..MAX_LOCAL_WORLD_ATTEMPTS {
            let world = self.select_local_world()?;
            let weights: Vec<f64> = world
                .iter()
                .map(|&id| self.nodes[id].raw_weight(kind))
                .collect();
            let total: f64 = weights.iter().sum();
            if total > 0.0 {
                let target = self.rng.gen::<f64>() * total;
                let mut acc = 0.0;
                let mut chosen = None;
                for (&id, &w) in world.iter().zip(&weights) {
                    if w > 0.0 {
                        acc += w;
                        chosen = Some(id);
                        if target < acc {
                            break;
                        }
                    }
                }
                return Ok((chosen.expect("positive total"), AttachRoute::Preferential));
            }
            let open: Vec<usize> = world
                .into_iter()
                .filter(|&id| !self.nodes[id].is_saturated())
                .collect();
            if !open.is_empty() {
                let id = open[self.rng.gen_range(0..open.len())];
                return Ok((id, AttachRoute::UniformUnsaturated));
            }
        }
        self.least_saturated()
            .map(|id| (id, AttachRoute::LeastSaturated))
            .ok_or_else(saturated_error)
    }

    fn choose_in_whole_network(&mut self, kind: NodeKind) -> Result<(usize, AttachRoute)> {
        let tree = match kind {
            NodeKind::Cluster => &self.degree_weights,
            NodeKind::Normal => &self.cluster_edge_weights,
        };
        if tree.positive() > 0 {
            let u = self.rng.gen::<f64>();
            let tree = match kind {
                NodeKind::Cluster => &self.degree_weights,
                NodeKind::Normal => &self.cluster_edge_weights,
            };
            let ord = tree.sample(u).expect("positive weights present");
            return Ok((self.clusters[ord], AttachRoute::Preferential));
        }
        if self.unsaturated.is_empty() {
            return Err(saturated_error());
        }
        let i = self.rng.gen_range(0..self.unsaturated.len());
        Ok((self.unsaturated.get(i), AttachRoute::UniformUnsaturated))
    }

    fn least_saturated(&self) -> Option<usize> {
        self.unsaturated.iter().min_by(|&a, &b| {
            let (na, nb) = (&self.nodes[a], &self.nodes[b]);
            let ra = na.degree as u64 * nb.kmax as u64;
            let rb = nb.degree as u64 * na.kmax as u64;
            ra.cmp(&rb).then(a.cmp(&b))
        })
    }

    /// Advance one time step.
    pub fn step(&mut self) -> Result<StepReport> {
        let kind = if self.rng.gen::<f64>() < self.params.p {
            NodeKind::Cluster
        } else {
            NodeKind::Normal
        };
        let (target, route) = self.choose_target(kind)?;
        let newcomer = match kind {
            NodeKind::Cluster => self.push_cluster_node(),
            NodeKind::Normal => self.push_normal_node(),
        };
        self.nodes[newcomer].birth = self.t + 1;
        self.add_edge(newcomer, target);
        self.stats.additions += 1;
        match kind {
            NodeKind::Cluster => self.stats.cluster_newcomers += 1,
            NodeKind::Normal => self.stats.normal_newcomers += 1,
        }
        match route {
            AttachRoute::Preferential => {}
            AttachRoute::UniformUnsaturated => self.stats.uniform_fallbacks += 1,
            AttachRoute::LeastSaturated => {
                self.stats.global_fallbacks += 1;
                log::debug!("t={}: attached node {newcomer} to least-saturated {target}", self.t);
            }
        }
        let mut touched = vec![newcomer, target];
        let (deletions, orphaned) = self.anti_preferential_delete(&mut touched);
        self.t += 1;
        Ok(StepReport {
            t: self.t,
            newcomer,
            kind,
            target,
            route,
            deletions,
            orphaned,
            touched,
        })
    }

    /// Remove on average `z` links: `floor(z)` attempts plus one more with
    /// probability `frac(z)`.
    ///
    /// Each attempt draws a victim uniformly among cluster nodes that still
    /// hold a cluster-to-cluster link and drops the link whose far endpoint
    /// has the lowest energy. Only when no such link exists anywhere is a
    /// normal node's sole link removed, orphaning it.
    fn anti_preferential_delete(&mut self, touched: &mut Vec<usize>) -> (usize, Vec<usize>) {
        let z = self.params.z;
        if z <= 0.0 {
            return (0, Vec::new());
        }
        let whole = z.floor();
        let mut attempts = whole as u64;
        if self.rng.gen::<f64>() < z - whole {
            attempts += 1;
        }
        let mut done = 0;
        let mut orphaned = Vec::new();
        for _ in 0..attempts {
            self.stats.deletion_attempts += 1;
            if !self.with_cluster_edges.is_empty() {
                let i = self.rng.gen_range(0..self.with_cluster_edges.len());
                let victim = self.with_cluster_edges.get(i);
                let far = self.adj[victim]
                    .iter()
                    .copied()
                    .filter(|&w| self.nodes[w].kind == NodeKind::Cluster)
                    .min_by(|&a, &b| {
                        let ea = self.nodes[a].energy.unwrap_or(0.0);
                        let eb = self.nodes[b].energy.unwrap_or(0.0);
                        ea.total_cmp(&eb).then(a.cmp(&b))
                    })
                    .expect("victim holds a cluster link");
                self.remove_edge(victim, far);
                touched.extend([victim, far]);
            } else if !self.with_edges.is_empty() {
                let i = self.rng.gen_range(0..self.with_edges.len());
                let victim = self.with_edges.get(i);
                let far = *self.adj[victim].iter().min().expect("victim has a link");
                self.remove_edge(victim, far);
                if self.nodes[far].kind == NodeKind::Normal {
                    self.orphans.insert(far);
                    orphaned.push(far);
                    log::debug!("t={}: normal node {far} orphaned by deletion", self.t);
                }
                touched.extend([victim, far]);
            } else {
                continue;
            }
            done += 1;
        }
        self.stats.deletions += done as u64;
        (done, orphaned)
    }

    pub fn degree_histogram(&self, filter: KindFilter) -> DegreeHistogram {
        DegreeHistogram::from_degrees(
            filter,
            self.nodes
                .iter()
                .filter(|n| filter.matches(n.kind))
                .map(|n| n.degree),
        )
    }

    pub fn mean_cluster_degree(&self) -> f64 {
        if self.clusters.is_empty() {
            return 0.0;
        }
        let total: u64 = self.clusters.iter().map(|&c| self.nodes[c].degree as u64).sum();
        total as f64 / self.clusters.len() as f64
    }

    /// Check every structural invariant over the whole network.
    pub fn check_invariants(&self) -> Result<(), String> {
        let expected_nodes = self.params.m0 as u64 + self.t;
        if self.nodes.len() as u64 != expected_nodes {
            return Err(format!(
                "node count {} != m0 + t = {expected_nodes}",
                self.nodes.len()
            ));
        }
        let expected_edges = self.params.initial_edges as u64 + self.stats.additions - self.stats.deletions;
        if self.edge_count() as u64 != expected_edges {
            return Err(format!(
                "edge count {} != initial + additions - deletions = {expected_edges}",
                self.edge_count()
            ));
        }
        let mut stamp = Stamps::new(self.nodes.len());
        for id in 0..self.nodes.len() {
            self.check_node(id, &mut stamp)?;
        }
        let clusters = self.nodes.iter().filter(|n| n.kind == NodeKind::Cluster).count();
        if clusters != self.clusters.len() {
            return Err("cluster index out of sync".into());
        }
        Ok(())
    }

    /// Check the invariants of the nodes a step touched.
    pub fn check_touched(&self, report: &StepReport) -> Result<(), String> {
        if self.nodes.len() as u64 != self.params.m0 as u64 + self.t {
            return Err(format!("node count {} != m0 + t", self.nodes.len()));
        }
        let mut stamp = Stamps::new(self.nodes.len());
        for &id in &report.touched {
            self.check_node(id, &mut stamp)?;
            for &w in &self.adj[id] {
                self.check_node(w, &mut stamp)?;
            }
        }
        Ok(())
    }

    fn check_node(&self, id: usize, stamp: &mut Stamps) -> Result<(), String> {
        let node = &self.nodes[id];
        stamp.epoch += 1;
        let ns = &self.adj[id];
        if node.degree as usize != ns.len() {
            return Err(format!("node {id}: degree {} but {} links", node.degree, ns.len()));
        }
        let mut cluster_links = 0;
        for &w in ns {
            if w == id {
                return Err(format!("node {id}: self-loop"));
            }
            if stamp.marks[w] == stamp.epoch {
                return Err(format!("node {id}: parallel edge to {w}"));
            }
            stamp.marks[w] = stamp.epoch;
            if !self.adj[w].contains(&id) {
                return Err(format!("edge {id}-{w} not symmetric"));
            }
            if self.nodes[w].kind == NodeKind::Cluster {
                cluster_links += 1;
            }
        }
        match node.kind {
            NodeKind::Normal => {
                if node.cluster_edges != 0 {
                    return Err(format!("normal node {id} counts cluster edges"));
                }
                match ns.as_slice() {
                    [w] if self.nodes[*w].kind == NodeKind::Cluster => {}
                    [] if self.orphans.contains(&id) => {}
                    [] => return Err(format!("normal node {id} has no link and is not a logged orphan")),
                    _ => {
                        return Err(format!(
                            "normal node {id} must hold exactly one link to a cluster node"
                        ))
                    }
                }
            }
            NodeKind::Cluster => {
                if node.cluster_edges != cluster_links {
                    return Err(format!(
                        "cluster node {id}: c = {} but {cluster_links} cluster links",
                        node.cluster_edges
                    ));
                }
                if node.degree > node.kmax {
                    return Err(format!(
                        "cluster node {id}: degree {} exceeds cap {}",
                        node.degree, node.kmax
                    ));
                }
                let energy = node.energy.ok_or_else(|| format!("cluster node {id} lacks energy"))?;
                if node.kmax != self.params.capacity(energy) {
                    return Err(format!("cluster node {id}: cap {} inconsistent with energy", node.kmax));
                }
            }
        }
        Ok(())
    }

    /// Run `steps` steps, checking the touched nodes after every step and the
    /// whole network periodically and at the end.
    pub fn run_checked(&mut self, steps: u64) -> Result<(), String> {
        self.check_invariants()?;
        for _ in 0..steps {
            let report = self.step().map_err(|e| e.to_string())?;
            self.check_touched(&report)?;
            if self.t % FULL_CHECK_INTERVAL == 0 {
                self.check_invariants()?;
            }
        }
        self.check_invariants()
    }
}

/// Per-call marks for duplicate-neighbour detection.
struct Stamps {
    marks: Vec<u64>,
    epoch: u64,
}

impl Stamps {
    fn new(n: usize) -> Self {
        Self {
            marks: vec![0; n],
            epoch: 0,
        }
    }
}

fn saturated_error() -> Error {
    Error::Structural("every cluster node is saturated; no attachment target exists".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(m0: usize, initial_edges: usize, seed: u64) -> EvolutionParams {
        EvolutionParams {
            m0,
            initial_edges,
            seed,
            ..EvolutionParams::default()
        }
    }

    fn cluster(degree: u32, kmax: u32, cluster_edges: u32) -> NodeState {
        NodeState {
            kind: NodeKind::Cluster,
            energy: Some(1.0),
            kmax,
            degree,
            cluster_edges,
            birth: 0,
        }
    }

    #[test]
    fn init_builds_seed_network() {
        let net = EvolvingNetwork::init(params(5, 4, 42)).unwrap();
        assert_eq!(net.node_count(), 5);
        assert_eq!(net.edge_count(), 4);
        assert!(net.nodes().iter().all(|n| n.kind == NodeKind::Cluster));
        net.check_invariants().unwrap();
        let again = EvolvingNetwork::init(params(5, 4, 42)).unwrap();
        assert_eq!(net.edges(), again.edges());
    }

    #[test]
    fn init_rejects_infeasible_edges() {
        assert!(matches!(
            EvolvingNetwork::init(params(2, 3, 1)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn init_with_extra_edges() {
        let net = EvolvingNetwork::init(EvolutionParams {
            m0: 6,
            initial_edges: 9,
            k_max: 40,
            ..EvolutionParams::default()
        })
        .unwrap();
        assert_eq!(net.edge_count(), 9);
        net.check_invariants().unwrap();
    }

    #[test]
    fn validation() {
        let mut p = EvolutionParams::default();
        p.p = 0.5;
        assert!(p.validate().is_err());
        p.relaxed = true;
        assert!(p.validate().is_ok());
        p.z = -0.1;
        assert!(p.validate().is_err());
        let mut p = EvolutionParams::default();
        p.e_min = 1.0;
        assert!(p.validate().is_err());
        let mut p = EvolutionParams::default();
        p.k_max = 1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn capacity_floors_with_minimum_one() {
        let p = EvolutionParams {
            k_max: 3,
            ..EvolutionParams::default()
        };
        assert_eq!(p.capacity(0.5), 1);
        assert_eq!(p.capacity(0.7), 2);
        assert_eq!(p.capacity(1.0), 3);
    }

    #[test]
    fn saturated_target_has_zero_weight() {
        let full = cluster(10, 10, 4);
        let other = cluster(3, 10, 2);
        let world = [&full, &other];
        assert_eq!(attach_weight(&full, NodeKind::Cluster, &world), 0.0);
        assert_eq!(attach_weight(&full, NodeKind::Normal, &world), 0.0);
    }

    #[test]
    fn symmetric_targets_are_equally_likely() {
        let a = cluster(3, 9, 1);
        let b = cluster(3, 9, 1);
        for kind in [NodeKind::Cluster, NodeKind::Normal] {
            let probs = attach_probabilities(&[&a, &b], kind).unwrap();
            assert_eq!(probs, vec![0.5, 0.5]);
        }
    }

    #[test]
    fn renormalised_cluster_weights() {
        // (0.8 * 2/8, 0.4 * 6/8) renormalised.
        let a = cluster(2, 10, 0);
        let b = cluster(6, 10, 0);
        let probs = attach_probabilities(&[&a, &b], NodeKind::Cluster).unwrap();
        assert!((probs[0] - 0.4).abs() < 1e-12);
        assert!((probs[1] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn zero_local_sum_has_no_distribution() {
        let a = cluster(2, 10, 0);
        let b = cluster(1, 10, 0);
        assert_eq!(attach_weight(&a, NodeKind::Normal, &[&a, &b]), 0.0);
        assert!(attach_probabilities(&[&a, &b], NodeKind::Normal).is_none());
    }

    #[test]
    fn local_world_saturates_at_cluster_count() {
        let mut net = EvolvingNetwork::init(EvolutionParams {
            local_world: 50,
            ..params(5, 4, 3)
        })
        .unwrap();
        let mut world = net.select_local_world().unwrap();
        world.sort_unstable();
        assert_eq!(world, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn local_world_of_one_is_uniform() {
        let mut net = EvolvingNetwork::init(EvolutionParams {
            m0: 4,
            initial_edges: 3,
            local_world: 1,
            seed: 11,
            ..EvolutionParams::default()
        })
        .unwrap();
        let mut counts = [0usize; 4];
        for _ in 0..10_000 {
            let world = net.select_local_world().unwrap();
            assert_eq!(world.len(), 1);
            counts[world[0]] += 1;
        }
        // 99% binomial bound around 2500 is about ±112; ±150 leaves margin.
        for c in counts {
            assert!((2350..=2650).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn local_world_members_are_distinct_clusters() {
        let mut net = EvolvingNetwork::init(EvolutionParams {
            local_world: 6,
            ..params(5, 4, 8)
        })
        .unwrap();
        for _ in 0..300 {
            net.step().unwrap();
        }
        for _ in 0..100 {
            let world = net.select_local_world().unwrap();
            assert_eq!(world.len(), 6);
            let set: BTreeSet<_> = world.iter().copied().collect();
            assert_eq!(set.len(), 6);
            assert!(world.iter().all(|&id| net.node(id).kind == NodeKind::Cluster));
        }
    }

    #[test]
    fn zero_deletion_rate_never_deletes() {
        let mut net = EvolvingNetwork::init(params(5, 4, 9)).unwrap();
        for _ in 0..2_000 {
            assert_eq!(net.step().unwrap().deletions, 0);
        }
        assert_eq!(net.stats().deletions, 0);
        assert_eq!(net.edge_count(), 4 + 2_000);
    }

    #[test]
    fn normal_nodes_hold_one_link_without_deletion() {
        let mut net = EvolvingNetwork::init(params(5, 4, 5)).unwrap();
        for _ in 0..3_000 {
            net.step().unwrap();
        }
        let hist = net.degree_histogram(KindFilter::Normal);
        assert_eq!(hist.counts.len(), 1);
        assert_eq!(hist.counts.get(&1).copied(), Some(hist.total));
        assert_eq!(hist.total as usize, net.node_count() - net.cluster_count());
    }

    #[test]
    fn saturated_network_reports_structural_error() {
        let mut net = EvolvingNetwork::init(EvolutionParams {
            m0: 2,
            initial_edges: 1,
            k_max: 2,
            p: 0.01,
            seed: 1,
            ..EvolutionParams::default()
        })
        .unwrap();
        let mut failed = false;
        for _ in 0..100 {
            match net.step() {
                Ok(_) => net.check_invariants().unwrap(),
                Err(Error::Structural(_)) => {
                    failed = true;
                    break;
                }
                Err(e) => panic!("unexpected {e}"),
            }
        }
        assert!(failed);
    }

    #[test]
    fn deletion_keeps_graph_simple() {
        let mut net = EvolvingNetwork::init(EvolutionParams {
            z: 0.7,
            ..params(6, 5, 21)
        })
        .unwrap();
        net.run_checked(3_000).unwrap();
        assert!(net.stats().deletions > 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_invariants_hold(
            seed in any::<u64>(),
            p in 0.05f64..0.49,
            z in 0.0f64..1.5,
            m in 1usize..12,
            k_max in 6u32..40,
        ) {
            let mut net = EvolvingNetwork::init(EvolutionParams {
                m0: 5,
                local_world: m,
                p,
                z,
                k_max,
                initial_edges: 4,
                seed,
                ..EvolutionParams::default()
            }).unwrap();
            for _ in 0..400 {
                let report = match net.step() {
                    Ok(r) => r,
                    Err(Error::Structural(_)) => break,
                    Err(e) => return Err(TestCaseError::fail(e.to_string())),
                };
                if let Err(msg) = net.check_touched(&report) {
                    return Err(TestCaseError::fail(msg));
                }
            }
            if let Err(msg) = net.check_invariants() {
                return Err(TestCaseError::fail(msg));
            }
        }

        #[test]
        fn prop_probabilities_sum_to_one(
            nodes in proptest::collection::vec((1u32..30, 0u32..30, 0u32..30), 1..20),
            cluster_newcomer in any::<bool>(),
        ) {
            let states: Vec<NodeState> = nodes
                .iter()
                .map(|&(kmax, d, c)| {
                    let degree = d.min(kmax);
                    cluster(degree, kmax, c.min(degree))
                })
                .collect();
            let refs: Vec<&NodeState> = states.iter().collect();
            let kind = if cluster_newcomer { NodeKind::Cluster } else { NodeKind::Normal };
            if let Some(probs) = attach_probabilities(&refs, kind) {
                let sum: f64 = probs.iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }
}
