//! Occupancy grids, tile-based shortest paths, and start/goal sampling.

mod field;
mod grid;
mod region;
mod sample;

pub use field::{distance_field, is_navigable, DistanceField};
pub use grid::{build_grid, build_grid_from_world, GridSpec, OccupancyGrid};
pub use region::{GoalRegion, RegionPart};
pub use sample::{resolve_goal, sample_start_goal, GoalInstance, ResolvedGoal, SampleOptions, StartGoal};

use crate::geom::point_in_polygon;
use crate::scene::{door_links, House};

pub const DEFAULT_RESOLUTION: f64 = 0.1;
pub const DEFAULT_AGENT_RADIUS: f64 = 0.1;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum NavError {
    #[error("grid resolution {resolution} must lie in (0, agent radius {agent_radius}]")]
    BadResolution { resolution: f64, agent_radius: f64 },
    #[error("house bounds are degenerate")]
    DegenerateBounds,
    #[error("house has no free cells")]
    NoFreeCells,
    #[error("no instance matches goal {0}")]
    NoInstances(String),
    #[error("goal {0} covers no reachable cell")]
    GoalUnreachable(String),
    #[error("goal {0} depends on the start pose")]
    NeedsStart(String),
    #[error("no navigable start/goal pair for {goal} after {attempts} attempts")]
    NoNavigablePair { goal: String, attempts: u32 },
}

/// Grid cell at the middle of every door between two rooms. Exterior doors
/// lead nowhere and are skipped.
pub fn door_cells(h: &House, g: &OccupancyGrid) -> Vec<Option<usize>> {
    door_links(h)
        .into_iter()
        .filter(|(_, rooms)| rooms.len() == 2)
        .map(|(i, _)| {
            let (a, b) = h.opening_segment(&h.openings[i])?;
            g.spec.cell_at((a + b) * 0.5)
        })
        .collect()
}

/// True when all door cells are free and lie in one free-space component that
/// also reaches into every room.
pub fn doors_and_rooms_connected(h: &House, g: &OccupancyGrid) -> bool {
    let labels = g.components();
    let doors = door_cells(h, g);
    let mut main = None;
    for d in doors {
        let Some(c) = d else { return false };
        if g.is_blocked(c) {
            return false;
        }
        match main {
            None => main = Some(labels[c]),
            Some(l) if l != labels[c] => return false,
            _ => {}
        }
    }
    let main = match main {
        Some(l) => l,
        None => {
            // no doors: use the largest component
            let mut counts = std::collections::HashMap::new();
            for &l in labels.iter().filter(|&&l| l != u32::MAX) {
                *counts.entry(l).or_insert(0usize) += 1;
            }
            match counts.into_iter().max_by_key(|&(l, n)| (n, std::cmp::Reverse(l))) {
                Some((l, _)) => l,
                None => return false,
            }
        }
    };
    h.rooms.iter().all(|r| {
        (0..g.len()).any(|i| labels[i] == main && point_in_polygon(g.spec.center(i), &r.floor_polygon))
    })
}
