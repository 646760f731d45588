//! Connected dominating set by marking and Rule-K pruning.

use std::collections::VecDeque;

use super::{cmp_priority, higher_priority, GeoNetwork, Protocol, Structure, TopologyResult};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RuleKOptions {
    /// Largest coverage set considered; `None` allows any size.
    pub max_cover: Option<usize>,
}

/// One pruning step: `node` was just unmarked; `marked` is the state after it.
#[derive(Debug)]
pub struct PruneStep<'a> {
    pub node: usize,
    pub cover: &'a [usize],
    pub marked: &'a [bool],
}

pub fn cds_rule_k(net: &GeoNetwork, opts: &RuleKOptions) -> TopologyResult {
    cds_rule_k_observed(net, opts, |_| {})
}

/// Rule K with a callback after every unmark, so tests can inspect each
/// intermediate state.
///
/// Marking: a node with two non-adjacent neighbours marks itself. Pruning
/// visits marked nodes from lowest to highest priority; a node unmarks when
/// its higher-priority marked neighbours contain a connected set that covers
/// its neighbourhood (each neighbour is in the set or next to it). Since
/// higher-priority nodes are visited later, they are still marked when used
/// as cover. A connected component without any marked node gets its
/// highest-priority node as the only head.
pub fn cds_rule_k_observed(
    net: &GeoNetwork,
    opts: &RuleKOptions,
    mut observe: impl FnMut(&PruneStep<'_>),
) -> TopologyResult {
    let n = net.len();
    let mut marked: Vec<bool> = (0..n).map(|v| has_open_pair(net, v)).collect();

    let mut order: Vec<usize> = (0..n).filter(|&v| marked[v]).collect();
    order.sort_by(|&a, &b| cmp_priority(net, a, b));
    for v in order {
        let higher: Vec<usize> = net
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| marked[u] && higher_priority(net, u, v))
            .collect();
        if let Some(cover) = find_cover(net, v, &higher, opts.max_cover) {
            marked[v] = false;
            observe(&PruneStep {
                node: v,
                cover: &cover,
                marked: &marked,
            });
        }
    }

    let mut diagnostics = Vec::new();
    for comp in components(net) {
        if comp.iter().all(|&v| !marked[v]) {
            let best = comp
                .iter()
                .copied()
                .reduce(|a, b| if higher_priority(net, b, a) { b } else { a })
                .expect("components are non-empty");
            marked[best] = true;
            if comp.len() > 1 {
                diagnostics.push(format!(
                    "no node marked in a component of {} nodes; {best} elected",
                    comp.len()
                ));
            }
        }
    }

    let active: Vec<usize> = (0..n).filter(|&v| marked[v]).collect();
    let edges: Vec<(usize, usize)> = net
        .edges()
        .into_iter()
        .filter(|&(u, v)| marked[u] && marked[v])
        .collect();
    TopologyResult::new(
        Protocol::CdsRuleK,
        net,
        active,
        Structure::Backbone { edges },
        Vec::new(),
        diagnostics,
    )
}

fn has_open_pair(net: &GeoNetwork, v: usize) -> bool {
    let ns = net.neighbors(v);
    ns.iter()
        .enumerate()
        .any(|(i, &a)| ns[i + 1..].iter().any(|&b| !net.are_adjacent(a, b)))
}

fn covers(net: &GeoNetwork, v: usize, set: &[usize]) -> bool {
    net.neighbors(v)
        .iter()
        .all(|&w| set.contains(&w) || set.iter().any(|&c| net.are_adjacent(c, w)))
}

fn find_cover(net: &GeoNetwork, v: usize, higher: &[usize], max_cover: Option<usize>) -> Option<Vec<usize>> {
    match max_cover {
        None => {
            // Any connected covering set can grow to its whole component, and a
            // bigger set covers at least as much, so checking components suffices.
            induced_components(net, higher)
                .into_iter()
                .find(|comp| covers(net, v, comp))
        }
        Some(k) => {
            let mut chosen = Vec::new();
            search_bounded(net, v, higher, k, 0, &mut chosen)
        }
    }
}

/// Enumerate subsets of `pool` of size at most `k` in index order and return
/// the first connected one that covers `v`.
fn search_bounded(
    net: &GeoNetwork,
    v: usize,
    pool: &[usize],
    k: usize,
    start: usize,
    chosen: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    if !chosen.is_empty() && covers(net, v, chosen) && induced_components(net, chosen).len() == 1 {
        return Some(chosen.clone());
    }
    if chosen.len() == k {
        return None;
    }
    for i in start..pool.len() {
        chosen.push(pool[i]);
        if let Some(found) = search_bounded(net, v, pool, k, i + 1, chosen) {
            return Some(found);
        }
        chosen.pop();
    }
    None
}

fn induced_components(net: &GeoNetwork, set: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; set.len()];
    let mut out = Vec::new();
    for s in 0..set.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![set[s]];
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            for (j, &w) in set.iter().enumerate() {
                if !seen[j] && net.are_adjacent(u, w) {
                    seen[j] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        out.push(comp);
    }
    out
}

fn components(net: &GeoNetwork) -> Vec<Vec<usize>> {
    let mut seen = vec![false; net.len()];
    let mut out = Vec::new();
    for s in 0..net.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            comp.push(u);
            for &w in net.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        out.push(comp);
    }
    out
}
