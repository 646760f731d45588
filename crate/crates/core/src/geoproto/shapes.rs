//! Small hand-placed deployments whose protocol outputs can be worked out by hand.

use super::{Area, GeoNetwork, GeoNode};

const RADIUS: f64 = 10.0;

fn build(points: &[(f64, f64)], side: f64) -> GeoNetwork {
    let nodes = points
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| GeoNode {
            id,
            x,
            y,
            energy: 1.0 - id as f64 * 1e-3,
        })
        .collect();
    GeoNetwork::new(nodes, Area::square(side), RADIUS).expect("hand-placed shape is valid")
}

/// Node 0 in the centre and `n - 1` leaves on a circle just inside range around
/// it; leaves are pairwise out of range for `n - 1 <= 5`. The centre is
/// also the centre of the area, so it is the default sink.
pub fn star(n: usize) -> GeoNetwork {
    assert!((1..=6).contains(&n), "star supports 1..=6 nodes");
    let centre = (20.0, 20.0);
    let mut pts = vec![centre];
    for i in 0..n - 1 {
        let a = std::f64::consts::TAU * i as f64 / (n - 1) as f64;
        // Just inside the range so rounding in cos/sin cannot drop a link.
        let r = 0.999 * RADIUS;
        pts.push((centre.0 + r * a.cos(), centre.1 + r * a.sin()));
    }
    build(&pts, 40.0)
}

/// `n` nodes on a line, consecutive ones exactly in range.
pub fn path(n: usize) -> GeoNetwork {
    assert!(n >= 1);
    let pts: Vec<(f64, f64)> = (0..n).map(|i| (i as f64 * RADIUS, 0.0)).collect();
    build(&pts, (n as f64 - 1.0).max(1.0) * RADIUS)
}

/// `n` nodes all within range of each other.
pub fn clique(n: usize) -> GeoNetwork {
    assert!(n >= 1);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            (5.0 + 2.0 * a.cos(), 5.0 + 2.0 * a.sin())
        })
        .collect();
    build(&pts, 10.0)
}
