use crate::geom::Vec2;
use crate::physics::CollisionWorld;
use crate::scene::House;

use super::NavError;

/// Placement of a regular grid on the ground plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub resolution: f64,
    /// Corner of cell (0, 0).
    pub origin: Vec2,
    pub width: usize,
    pub height: usize,
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, x: usize, z: usize) -> usize {
        z * self.width + x
    }

    pub fn coords(&self, i: usize) -> (usize, usize) {
        (i % self.width, i / self.width)
    }

    pub fn center(&self, i: usize) -> Vec2 {
        let (x, z) = self.coords(i);
        self.origin + Vec2::new((x as f64 + 0.5) * self.resolution, (z as f64 + 0.5) * self.resolution)
    }

    /// Cell containing `p`, if inside the grid.
    pub fn cell_at(&self, p: Vec2) -> Option<usize> {
        let fx = ((p.x - self.origin.x) / self.resolution).floor();
        let fz = ((p.z - self.origin.z) / self.resolution).floor();
        if fx < 0.0 || fz < 0.0 || fx >= self.width as f64 || fz >= self.height as f64 {
            return None;
        }
        Some(self.index(fx as usize, fz as usize))
    }
}

/// Free/blocked bitmap for a disc-shaped agent.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub spec: GridSpec,
    blocked: Vec<bool>,
}

/// 8-neighborhood offsets; the first four are axial.
pub(crate) const NEIGHBORS: [(i64, i64); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

impl OccupancyGrid {
    pub fn from_cells(spec: GridSpec, blocked: Vec<bool>) -> Self {
        assert_eq!(spec.len(), blocked.len(), "cell count must match grid size");
        OccupancyGrid { spec, blocked }
    }

    pub fn resolution(&self) -> f64 {
        self.spec.resolution
    }

    pub fn width(&self) -> usize {
        self.spec.width
    }

    pub fn height(&self) -> usize {
        self.spec.height
    }

    pub fn len(&self) -> usize {
        self.blocked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocked.is_empty()
    }

    pub fn is_blocked(&self, i: usize) -> bool {
        self.blocked[i]
    }

    pub fn is_free(&self, i: usize) -> bool {
        !self.blocked[i]
    }

    pub fn cells(&self) -> &[bool] {
        &self.blocked
    }

    pub fn free_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| !self.blocked[i])
    }

    fn free_at(&self, x: i64, z: i64) -> bool {
        x >= 0
            && z >= 0
            && (x as usize) < self.spec.width
            && (z as usize) < self.spec.height
            && !self.blocked[self.spec.index(x as usize, z as usize)]
    }

    /// Free neighbors of cell `i` with the step multiplier (1 or √2 in
    /// resolution units). Diagonal moves need both adjacent axial cells free.
    pub(crate) fn for_each_neighbor(&self, i: usize, mut f: impl FnMut(usize, bool)) {
        let (x, z) = self.spec.coords(i);
        let (x, z) = (x as i64, z as i64);
        for (k, &(dx, dz)) in NEIGHBORS.iter().enumerate() {
            let diagonal = k >= 4;
            let (nx, nz) = (x + dx, z + dz);
            if !self.free_at(nx, nz) {
                continue;
            }
            if diagonal && !(self.free_at(x + dx, z) && self.free_at(x, z + dz)) {
                continue;
            }
            f(self.spec.index(nx as usize, nz as usize), diagonal);
        }
    }

    /// Connected components of free space (same moves as the distance field).
    /// Blocked cells get `u32::MAX`.
    pub fn components(&self) -> Vec<u32> {
        let mut label = vec![u32::MAX; self.len()];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.len() {
            if self.blocked[s] || label[s] != u32::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(c) = stack.pop() {
                self.for_each_neighbor(c, |n, _| {
                    if label[n] == u32::MAX {
                        label[n] = next;
                        stack.push(n);
                    }
                });
            }
            next += 1;
        }
        label
    }
}

/// Rasterize the house for an agent of `agent_radius`: a cell is blocked iff a
/// disc of that radius centered on the cell center overlaps a wall, a piece
/// of furniture, or leaves the house bounds.
pub fn build_grid(h: &House, agent_radius: f64, resolution: f64) -> Result<OccupancyGrid, NavError> {
    let world = CollisionWorld::from_house(h, crate::physics::AgentConfig::default().height);
    build_grid_from_world(&world, agent_radius, resolution)
}

pub fn build_grid_from_world(
    world: &CollisionWorld,
    agent_radius: f64,
    resolution: f64,
) -> Result<OccupancyGrid, NavError> {
    if !(resolution > 0.0 && resolution <= agent_radius) {
        return Err(NavError::BadResolution {
            resolution,
            agent_radius,
        });
    }
    let b = world.bounds;
    if b.is_degenerate() {
        return Err(NavError::DegenerateBounds);
    }
    let width = (b.width() / resolution - 1e-9).ceil().max(1.0) as usize;
    let height = (b.depth() / resolution - 1e-9).ceil().max(1.0) as usize;
    let spec = GridSpec {
        resolution,
        origin: b.min,
        width,
        height,
    };
    let mut blocked = vec![false; spec.len()];
    for o in &world.obstacles {
        let bb = o.bbox().expanded(agent_radius);
        let x0 = (((bb.min.x - spec.origin.x) / resolution - 0.5).floor().max(0.0)) as usize;
        let z0 = (((bb.min.z - spec.origin.z) / resolution - 0.5).floor().max(0.0)) as usize;
        let x1 = (((bb.max.x - spec.origin.x) / resolution - 0.5).ceil().max(0.0) as usize).min(width - 1);
        let z1 = (((bb.max.z - spec.origin.z) / resolution - 0.5).ceil().max(0.0) as usize).min(height - 1);
        for z in z0..=z1 {
            for x in x0..=x1 {
                let i = spec.index(x, z);
                if !blocked[i] && o.signed_distance(spec.center(i)).0 < agent_radius {
                    blocked[i] = true;
                }
            }
        }
    }
    Ok(OccupancyGrid { spec, blocked })
}
