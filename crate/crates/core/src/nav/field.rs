use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::geom::Vec2;

use super::grid::{GridSpec, OccupancyGrid};

/// Shortest-path distance (m) from every cell to a goal cell set.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    pub spec: GridSpec,
    dist: Vec<f64>,
}

impl DistanceField {
    pub fn get(&self, cell: usize) -> f64 {
        self.dist[cell]
    }

    pub fn values(&self) -> &[f64] {
        &self.dist
    }

    /// Bilinear interpolation between the four surrounding cell centers.
    /// Unreachable corners are dropped and the remaining weights renormalized;
    /// returns infinity when no corner is reachable or `p` is off the grid.
    pub fn sample(&self, p: Vec2) -> f64 {
        let s = &self.spec;
        let u = (p.x - s.origin.x) / s.resolution - 0.5;
        let v = (p.z - s.origin.z) / s.resolution - 0.5;
        if !(u.is_finite() && v.is_finite()) || u < -1.0 || v < -1.0 || u > s.width as f64 || v > s.height as f64 {
            return f64::INFINITY;
        }
        let (x0, z0) = (u.floor(), v.floor());
        let (fx, fz) = (u - x0, v - z0);
        let mut acc = 0.0;
        let mut weight = 0.0;
        for (dx, dz, w) in [
            (0, 0, (1.0 - fx) * (1.0 - fz)),
            (1, 0, fx * (1.0 - fz)),
            (0, 1, (1.0 - fx) * fz),
            (1, 1, fx * fz),
        ] {
            let (x, z) = (x0 as i64 + dx, z0 as i64 + dz);
            if x < 0 || z < 0 || x as usize >= s.width || z as usize >= s.height || w == 0.0 {
                continue;
            }
            let d = self.dist[s.index(x as usize, z as usize)];
            if d.is_finite() {
                acc += w * d;
                weight += w;
            }
        }
        if weight > 0.0 {
            acc / weight
        } else {
            f64::INFINITY
        }
    }
}

/// 8-connected Dijkstra from `goal_cells` through free cells.
///
/// Axial steps cost one resolution, diagonal steps resolution·√2, and a
/// diagonal step needs both adjacent axial cells free. A blocked goal cell has
/// distance 0 but does not propagate.
pub fn distance_field(g: &OccupancyGrid, goal_cells: &[usize]) -> DistanceField {
    let axial = g.resolution();
    let diagonal = g.resolution() * std::f64::consts::SQRT_2;
    let mut dist = vec![f64::INFINITY; g.len()];
    let mut heap = BinaryHeap::new();
    for &c in goal_cells {
        dist[c] = 0.0;
        if g.is_free(c) {
            heap.push(Reverse((0u64, c)));
        }
    }
    // non-negative floats order like their bit patterns
    while let Some(Reverse((bits, c))) = heap.pop() {
        let d = f64::from_bits(bits);
        if d > dist[c] {
            continue;
        }
        g.for_each_neighbor(c, |n, diag| {
            let nd = d + if diag { diagonal } else { axial };
            if nd < dist[n] {
                dist[n] = nd;
                heap.push(Reverse((nd.to_bits(), n)));
            }
        });
    }
    DistanceField { spec: g.spec, dist }
}

pub fn is_navigable(g: &OccupancyGrid, start_cell: usize, goal_cells: &[usize]) -> bool {
    distance_field(g, goal_cells).get(start_cell).is_finite()
}
