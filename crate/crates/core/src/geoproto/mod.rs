//! Localized topology-control protocols on random geometric deployments.
//!
//! Every protocol elects a set of active nodes (cluster heads); the other
//! nodes are normal nodes attached to a head. Two observables are reported
//! per run: the head count `n(E)` and the average number of radio neighbours
//! per head `k`.

mod a3;
mod graph;
mod rule_k;
pub mod shapes;
mod simple_tree;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use a3::a3;
pub use graph::{generate_rgg, Area, GeoNetwork, GeoNode};
pub use rule_k::{cds_rule_k, cds_rule_k_observed, PruneStep, RuleKOptions};
pub use simple_tree::simple_tree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    SimpleTree,
    A3,
    CdsRuleK,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::SimpleTree, Protocol::A3, Protocol::CdsRuleK];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::SimpleTree => "simple-tree",
            Protocol::A3 => "a3",
            Protocol::CdsRuleK => "cds-rule-k",
        }
    }

    /// Run the protocol with the default options. Rule K ignores `sink` and `seed`.
    pub fn run(self, net: &GeoNetwork, sink: usize, seed: u64) -> Result<TopologyResult> {
        match self {
            Protocol::SimpleTree => simple_tree(net, sink, seed),
            Protocol::A3 => a3(net, sink, seed),
            Protocol::CdsRuleK => Ok(cds_rule_k(net, &RuleKOptions::default())),
        }
    }
}

impl std::str::FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simple-tree" | "simpletree" | "tree" => Ok(Protocol::SimpleTree),
            "a3" => Ok(Protocol::A3),
            "cds-rule-k" | "rule-k" | "rulek" | "cds" => Ok(Protocol::CdsRuleK),
            other => Err(Error::Config(format!("unknown protocol `{other}`"))),
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The links a protocol keeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Structure {
    /// Parent of every reached node; `None` for the root and unreached nodes.
    Tree { root: usize, parent: Vec<Option<usize>> },
    /// Links among active nodes.
    Backbone { edges: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyResult {
    pub protocol: Protocol,
    /// Sorted ids of the cluster heads.
    pub active: Vec<usize>,
    pub structure: Structure,
    /// Radio degree of each head, aligned with `active`.
    pub head_neighbors: Vec<usize>,
    /// Nodes the protocol could not reach from its starting point.
    pub unreached: Vec<usize>,
    pub diagnostics: Vec<String>,
}

impl TopologyResult {
    pub(crate) fn new(
        protocol: Protocol,
        net: &GeoNetwork,
        mut active: Vec<usize>,
        structure: Structure,
        unreached: Vec<usize>,
        diagnostics: Vec<String>,
    ) -> Self {
        active.sort_unstable();
        active.dedup();
        let head_neighbors = active.iter().map(|&h| net.degree(h)).collect();
        Self {
            protocol,
            active,
            structure,
            head_neighbors,
            unreached,
            diagnostics,
        }
    }

    pub fn is_active(&self, id: usize) -> bool {
        self.active.binary_search(&id).is_ok()
    }

    /// Tree links as `(child, parent)` pairs, empty for backbones.
    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        match &self.structure {
            Structure::Tree { parent, .. } => parent
                .iter()
                .enumerate()
                .filter_map(|(c, p)| p.map(|p| (c, p)))
                .collect(),
            Structure::Backbone { .. } => Vec::new(),
        }
    }
}

/// Number of cluster heads, the `n(E)` observable.
pub fn head_count(result: &TopologyResult) -> usize {
    result.active.len()
}

/// Radio neighbours summed over the heads and divided by the head count.
pub fn avg_neighbor_count(net: &GeoNetwork, result: &TopologyResult) -> Result<f64> {
    if result.active.is_empty() {
        return Err(Error::UndefinedMetric(
            "average neighbour count needs at least one head".into(),
        ));
    }
    let total: usize = result.active.iter().map(|&h| net.degree(h)).sum();
    Ok(total as f64 / result.active.len() as f64)
}

/// Whether every node in `scope` is active or adjacent to an active node.
pub fn is_dominating(net: &GeoNetwork, active: &[bool], scope: &[bool]) -> bool {
    (0..net.len()).all(|v| {
        !scope[v] || active[v] || net.neighbors(v).iter().any(|&u| active[u])
    })
}

/// Whether the active nodes induce a connected subgraph (true when empty).
pub fn induces_connected(net: &GeoNetwork, active: &[bool]) -> bool {
    count_components(net, active) <= 1
}

/// Connected components of the subgraph induced by `mask`.
pub fn count_components(net: &GeoNetwork, mask: &[bool]) -> usize {
    let mut seen = vec![false; net.len()];
    let mut count = 0;
    for s in 0..net.len() {
        if !mask[s] || seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in net.neighbors(u) {
                if mask[v] && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    count
}

/// Structural checks every protocol output must pass; returns the violations.
pub fn verify(net: &GeoNetwork, result: &TopologyResult) -> Vec<String> {
    let mut problems = Vec::new();
    let n = net.len();
    if result.active.iter().any(|&a| a >= n) {
        problems.push("active set references unknown nodes".to_string());
        return problems;
    }
    let mut active = vec![false; n];
    for &a in &result.active {
        active[a] = true;
    }
    let mut scope = vec![true; n];
    for &u in &result.unreached {
        scope[u] = false;
    }
    if !result.active.is_empty() && !is_dominating(net, &active, &scope) {
        problems.push("active set does not dominate the reached nodes".to_string());
    }
    match &result.structure {
        Structure::Tree { root, parent } => {
            let reached = scope.iter().filter(|&&s| s).count();
            let links = parent.iter().filter(|p| p.is_some()).count();
            if reached > 0 && links + 1 != reached {
                problems.push(format!("tree has {links} links for {reached} reached nodes"));
            }
            for (c, p) in parent.iter().enumerate() {
                if let Some(p) = *p {
                    if !net.are_adjacent(c, p) {
                        problems.push(format!("tree link {c}-{p} is not a radio link"));
                    }
                    if !active[p] {
                        problems.push(format!("parent {p} of {c} is not a head"));
                    }
                }
            }
            // Every reached node must climb to the root without revisiting.
            for start in 0..n {
                if !scope[start] {
                    continue;
                }
                let mut v = start;
                let mut hops = 0;
                while let Some(p) = parent[v] {
                    v = p;
                    hops += 1;
                    if hops > n {
                        break;
                    }
                }
                if v != *root {
                    problems.push(format!("node {start} does not reach the root"));
                    break;
                }
            }
        }
        Structure::Backbone { edges } => {
            for &(u, v) in edges {
                if !active[u] || !active[v] || !net.are_adjacent(u, v) {
                    problems.push(format!("backbone link {u}-{v} is invalid"));
                }
            }
            // One connected piece of backbone per connected piece of graph.
            let all = vec![true; n];
            if count_components(net, &active) != count_components(net, &all) {
                problems.push("active set is not connected".to_string());
            }
        }
    }
    problems
}

/// Ranking key shared by the protocols that compare nodes: energy, then id.
pub(crate) fn priority(net: &GeoNetwork, id: usize) -> (f64, usize) {
    (net.node(id).energy, id)
}

pub(crate) fn cmp_priority(net: &GeoNetwork, a: usize, b: usize) -> std::cmp::Ordering {
    let (ea, ia) = priority(net, a);
    let (eb, ib) = priority(net, b);
    ea.total_cmp(&eb).then(ia.cmp(&ib))
}

pub(crate) fn higher_priority(net: &GeoNetwork, a: usize, b: usize) -> bool {
    cmp_priority(net, a, b).is_gt()
}
