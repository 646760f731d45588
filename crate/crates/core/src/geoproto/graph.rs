//! Random geometric deployments and their plain-text encoding.
//!
//! Text format, one item per line, whitespace separated:
//!
//! ```text
//! N <count> AREA <width> <height> RADIUS <radius>
//! <id> <x> <y> <energy>          (count lines, ids 0..count in order)
//! EDGES <m>
//! <u> <v>                        (m lines, u < v, sorted)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. On reading, the edge
//! list must equal the adjacency recomputed from positions and radius.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Area {
    pub fn square(side: f64) -> Self {
        Self {
            width: side,
            height: side,
        }
    }

    pub fn size(&self) -> f64 {
        self.width * self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoNode {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub energy: f64,
}

impl GeoNode {
    pub fn distance(&self, other: &GeoNode) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Nodes in a rectangle, linked when within `radius` of each other.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoNetwork {
    nodes: Vec<GeoNode>,
    area: Area,
    radius: f64,
    adj: Vec<Vec<usize>>,
}

fn within(a: &GeoNode, b: &GeoNode, radius: f64) -> bool {
    let (dx, dy) = (a.x - b.x, a.y - b.y);
    dx * dx + dy * dy <= radius * radius
}

impl GeoNetwork {
    /// Build a network from placed nodes; ids must be `0..n` in order.
    pub fn new(nodes: Vec<GeoNode>, area: Area, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(config(format!("radius {radius} must be positive")));
        }
        if !(area.width > 0.0 && area.height > 0.0) {
            return Err(config("area must have positive width and height"));
        }
        for (i, n) in nodes.iter().enumerate() {
            if n.id != i {
                return Err(config(format!("node at position {i} has id {}", n.id)));
            }
            if !(0.0..=area.width).contains(&n.x) || !(0.0..=area.height).contains(&n.y) {
                return Err(config(format!("node {i} lies outside the area")));
            }
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if within(&nodes[i], &nodes[j], radius) {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for ns in &mut adj {
            ns.sort_unstable();
        }
        Ok(Self {
            nodes,
            area,
            radius,
            adj,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[GeoNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &GeoNode {
        &self.nodes[id]
    }

    pub fn area(&self) -> Area {
        self.area
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Sorted radio neighbours.
    pub fn neighbors(&self, id: usize) -> &[usize] {
        &self.adj[id]
    }

    pub fn degree(&self, id: usize) -> usize {
        self.adj[id].len()
    }

    pub fn are_adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn mean_degree(&self) -> f64 {
        if self.nodes.is_empty() {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.nodes.len() as f64
    }

    /// Sorted edge list with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect()
    }

    /// Membership mask of the nodes reachable from `source`.
    pub fn reachable_from(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([source]);
        seen[source] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.nodes.is_empty() || self.reachable_from(0).iter().all(|&s| s)
    }

    /// Node closest to the centre of the area, lowest id on ties.
    pub fn nearest_to_center(&self) -> Option<usize> {
        let (cx, cy) = (self.area.width / 2.0, self.area.height / 2.0);
        self.nodes
            .iter()
            .map(|n| (n.id, (n.x - cx).hypot(n.y - cy)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(id, _)| id)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "N {} AREA {} {} RADIUS {}",
            self.nodes.len(),
            self.area.width,
            self.area.height,
            self.radius
        );
        for n in &self.nodes {
            let _ = writeln!(out, "{} {} {} {}", n.id, n.x, n.y, n.energy);
        }
        let edges = self.edges();
        let _ = writeln!(out, "EDGES {}", edges.len());
        for (u, v) in edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 7 || h[0] != "N" || h[2] != "AREA" || h[5] != "RADIUS" {
            return Err(parse_err(ln, "expected `N <n> AREA <w> <h> RADIUS <r>`"));
        }
        let n: usize = num(ln, h[1])?;
        let area = Area {
            width: num(ln, h[3])?,
            height: num(ln, h[4])?,
        };
        let radius: f64 = num(ln, h[6])?;

        let mut nodes = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, line) = lines.next().ok_or_else(|| parse_err(0, "truncated node list"))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(parse_err(ln, "expected `<id> <x> <y> <energy>`"));
            }
            nodes.push(GeoNode {
                id: num(ln, f[0])?,
                x: num(ln, f[1])?,
                y: num(ln, f[2])?,
                energy: num(ln, f[3])?,
            });
        }

        let (ln, edge_header) = lines.next().ok_or_else(|| parse_err(0, "missing EDGES line"))?;
        let e: Vec<&str> = edge_header.split_whitespace().collect();
        if e.len() != 2 || e[0] != "EDGES" {
            return Err(parse_err(ln, "expected `EDGES <m>`"));
        }
        let m: usize = num(ln, e[1])?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, line) = lines.next().ok_or_else(|| parse_err(0, "truncated edge list"))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 2 {
                return Err(parse_err(ln, "expected `<u> <v>`"));
            }
            let (u, v): (usize, usize) = (num(ln, f[0])?, num(ln, f[1])?);
            edges.push((u.min(v), u.max(v)));
        }
        if let Some((ln, _)) = lines.next() {
            return Err(parse_err(ln, "unexpected trailing content"));
        }

        let net = GeoNetwork::new(nodes, area, radius)?;
        edges.sort_unstable();
        if edges != net.edges() {
            return Err(config(
                "stored edge list does not match the adjacency implied by positions and radius",
            ));
        }
        Ok(net)
    }
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
    }
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| parse_err(line, &format!("cannot parse `{s}`")))
}

/// `n` nodes placed uniformly in `area` with energies uniform in `[0.5, 1]`.
pub fn generate_rgg(n: usize, area: Area, radius: f64, seed: u64) -> Result<GeoNetwork> {
    if n == 0 {
        return Err(config("a deployment needs at least one node"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (0..n)
        .map(|id| GeoNode {
            id,
            x: rng.gen_range(0.0..=area.width),
            y: rng.gen_range(0.0..=area.height),
            energy: rng.gen_range(0.5..=1.0),
        })
        .collect();
    GeoNetwork::new(nodes, area, radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_has_no_links() {
        let net = generate_rgg(1, Area::square(600.0), 100.0, 3).unwrap();
        assert_eq!(net.edge_count(), 0);
        assert!(net.is_connected());
    }

    #[test]
    fn larger_radius_keeps_every_link() {
        for seed in 0..10 {
            let small = generate_rgg(80, Area::square(600.0), 90.0, seed).unwrap();
            let large = generate_rgg(80, Area::square(600.0), 180.0, seed).unwrap();
            assert_eq!(small.nodes(), large.nodes());
            for (u, v) in small.edges() {
                assert!(large.are_adjacent(u, v));
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_rgg(50, Area::square(300.0), 60.0, 9).unwrap();
        let b = generate_rgg(50, Area::square(300.0), 60.0, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.nodes().iter().all(|n| (0.5..=1.0).contains(&n.energy)));
    }

    #[test]
    fn text_round_trip() {
        let net = generate_rgg(40, Area { width: 400.0, height: 250.0 }, 70.0, 5).unwrap();
        let text = net.to_text();
        let back = GeoNetwork::from_text(&text).unwrap();
        assert_eq!(back, net);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn text_with_wrong_edges_is_rejected() {
        let text = "N 2 AREA 10 10 RADIUS 1\n0 0 0 1\n1 5 5 1\nEDGES 1\n0 1\n";
        assert!(matches!(GeoNetwork::from_text(text), Err(Error::Config(_))));
        let bad = "N 2 AREA 10 10 RADIUS 1\n0 0 0 1\n";
        assert!(matches!(GeoNetwork::from_text(bad), Err(Error::Parse { .. })));
    }

    #[test]
    fn sink_is_nearest_the_centre() {
        let nodes = vec![
            GeoNode { id: 0, x: 0.0, y: 0.0, energy: 1.0 },
            GeoNode { id: 1, x: 48.0, y: 52.0, energy: 1.0 },
            GeoNode { id: 2, x: 90.0, y: 10.0, energy: 1.0 },
        ];
        let net = GeoNetwork::new(nodes, Area::square(100.0), 10.0).unwrap();
        assert_eq!(net.nearest_to_center(), Some(1));
    }
}
