//! Randomized broadcast tree grown from the sink.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GeoNetwork, Protocol, Structure, TopologyResult};
use crate::error::{config, Result};

/// Broadcast instant ordered by `total_cmp`, ties broken by node id.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Broadcast {
    time: f64,
    node: usize,
}

impl Eq for Broadcast {}

impl Ord for Broadcast {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.time.total_cmp(&other.time).then(self.node.cmp(&other.node))
    }
}

impl PartialOrd for Broadcast {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Invitation flooding from the sink. A broadcast reaches every radio
/// neighbour at once; a node not yet in the tree adopts the sender as parent
/// and re-broadcasts after its own `U(0, 1)` backoff. The backoffs, drawn per
/// seed, decide the order in which invitations compete. Internal nodes of
/// the resulting tree are the cluster heads.
pub fn simple_tree(net: &GeoNetwork, sink: usize, seed: u64) -> Result<TopologyResult> {
    if sink >= net.len() {
        return Err(config(format!("sink {sink} is not a node")));
    }
    let n = net.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut reached = vec![false; n];
    let mut heap = BinaryHeap::new();
    reached[sink] = true;
    heap.push(Reverse(Broadcast { time: 0.0, node: sink }));
    while let Some(Reverse(b)) = heap.pop() {
        for &v in net.neighbors(b.node) {
            if !reached[v] {
                reached[v] = true;
                parent[v] = Some(b.node);
                heap.push(Reverse(Broadcast {
                    time: b.time + rng.gen::<f64>(),
                    node: v,
                }));
            }
        }
    }

    let mut internal = vec![false; n];
    for p in parent.iter().flatten() {
        internal[*p] = true;
    }
    let active: Vec<usize> = (0..n).filter(|&v| internal[v]).collect();
    let unreached: Vec<usize> = (0..n).filter(|&v| !reached[v]).collect();
    let mut diagnostics = Vec::new();
    if net.degree(sink) == 0 {
        diagnostics.push(format!("sink {sink} has no neighbours; no tree was built"));
    }
    if !unreached.is_empty() {
        diagnostics.push(format!("{} nodes unreachable from the sink", unreached.len()));
    }
    Ok(TopologyResult::new(
        Protocol::SimpleTree,
        net,
        active,
        Structure::Tree { root: sink, parent },
        unreached,
        diagnostics,
    ))
}
