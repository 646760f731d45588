//! Simplified A3: a sink-rooted tree whose internal nodes form an approximate
//! connected dominating set.

use std::collections::VecDeque;

use super::{GeoNetwork, Protocol, Structure, TopologyResult};
use crate::error::{config, Result};

/// Grow the tree from the sink without radio timing.
///
/// An active node hands the nodes it newly covered to a candidate list,
/// ranked by energy (high first), then distance from that node (far first),
/// then id. Candidates are taken in order: one adjacent to a sibling already
/// activated in this round sleeps, as does one with nothing left to cover.
/// An activated candidate immediately covers its uncovered neighbours, which
/// become its own candidates. When the queue drains, the best sleeping node
/// that still sees an uncovered neighbour is woken, so every reachable node
/// ends up covered.
///
/// `_seed` is accepted for interface symmetry; this variant is deterministic.
pub fn a3(net: &GeoNetwork, sink: usize, _seed: u64) -> Result<TopologyResult> {
    if sink >= net.len() {
        return Err(config(format!("sink {sink} is not a node")));
    }
    let n = net.len();
    let mut covered = vec![false; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut active = vec![false; n];
    let mut sleeping = vec![false; n];
    let mut pending: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue = VecDeque::new();

    let cover_from = |v: usize, covered: &mut [bool], parent: &mut [Option<usize>]| -> Vec<usize> {
        let fresh: Vec<usize> = net.neighbors(v).iter().copied().filter(|&w| !covered[w]).collect();
        for &w in &fresh {
            covered[w] = true;
            parent[w] = Some(v);
        }
        fresh
    };

    covered[sink] = true;
    active[sink] = true;
    pending[sink] = cover_from(sink, &mut covered, &mut parent);
    queue.push_back(sink);

    loop {
        while let Some(u) = queue.pop_front() {
            let mut cands = std::mem::take(&mut pending[u]);
            let origin = net.node(u);
            cands.sort_by(|&a, &b| {
                let (na, nb) = (net.node(a), net.node(b));
                nb.energy
                    .total_cmp(&na.energy)
                    .then(nb.distance(origin).total_cmp(&na.distance(origin)))
                    .then(a.cmp(&b))
            });
            let mut siblings: Vec<usize> = Vec::new();
            for v in cands {
                let next_to_sibling = siblings.iter().any(|&s| net.are_adjacent(s, v));
                let has_uncovered = net.neighbors(v).iter().any(|&w| !covered[w]);
                if next_to_sibling || !has_uncovered {
                    sleeping[v] = true;
                    continue;
                }
                siblings.push(v);
                active[v] = true;
                pending[v] = cover_from(v, &mut covered, &mut parent);
                queue.push_back(v);
            }
        }
        // Repair: wake the best sleeper that can still extend coverage.
        let wake = (0..n)
            .filter(|&v| sleeping[v] && net.neighbors(v).iter().any(|&w| !covered[w]))
            .max_by(|&a, &b| net.node(a).energy.total_cmp(&net.node(b).energy).then(b.cmp(&a)));
        let Some(v) = wake else { break };
        sleeping[v] = false;
        active[v] = true;
        pending[v] = cover_from(v, &mut covered, &mut parent);
        queue.push_back(v);
    }

    let unreached: Vec<usize> = (0..n).filter(|&v| !covered[v]).collect();
    let mut diagnostics = Vec::new();
    if net.degree(sink) == 0 {
        diagnostics.push(format!("sink {sink} has no neighbours; it is the only head"));
    }
    if !unreached.is_empty() {
        diagnostics.push(format!("{} nodes unreachable from the sink", unreached.len()));
    }
    Ok(TopologyResult::new(
        Protocol::A3,
        net,
        (0..n).filter(|&v| active[v]).collect(),
        Structure::Tree { root: sink, parent },
        unreached,
        diagnostics,
    ))
}
