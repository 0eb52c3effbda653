use std::f64::consts::TAU;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::physics::AgentState;
use crate::scene::{Category, House, OpeningKind};
use crate::seed;
use crate::task::{GoalSpec, ObjectSelect};

use super::field::{distance_field, DistanceField};
use super::grid::OccupancyGrid;
use super::region::{GoalRegion, RegionPart};
use super::NavError;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOptions {
    /// Success threshold for object and room goals (m).
    pub success_distance: f64,
    /// Minimum shortest-path distance between start and goal (m).
    pub min_geodesic: f64,
    pub max_attempts: u32,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            success_distance: 0.5,
            min_geodesic: 0.0,
            max_attempts: 500,
        }
    }
}

/// The concrete goal an episode navigates to.
#[derive(Debug, Clone, PartialEq)]
pub enum GoalInstance {
    Point,
    Object(u32),
    /// Index into `House::openings`.
    Opening(usize),
    /// Any instance of the category.
    AnyOf(Category),
    Rooms(Vec<u32>),
}

#[derive(Debug, Clone)]
pub struct ResolvedGoal {
    pub spec: GoalSpec,
    pub instance: GoalInstance,
    pub region: GoalRegion,
    pub cells: Vec<usize>,
    pub field: DistanceField,
    /// Success when the agent center is within this distance of the region.
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub struct StartGoal {
    pub start: AgentState,
    pub goal: ResolvedGoal,
}

struct Candidate {
    instance: GoalInstance,
    region: GoalRegion,
    cells: Vec<usize>,
}

/// Instances of an object category: furniture footprints, or opening segments
/// for doors and windows.
fn category_instances(h: &House, category: Category, g: &OccupancyGrid, fallback: f64) -> Vec<Candidate> {
    let mut out = Vec::new();
    let opening_kind = match category {
        Category::Door => Some(OpeningKind::Door),
        Category::Window => Some(OpeningKind::Window),
        _ => None,
    };
    if let Some(kind) = opening_kind {
        for (i, o) in h.openings.iter().enumerate() {
            if o.kind != kind {
                continue;
            }
            if let Some((a, b)) = h.opening_segment(o) {
                let region = GoalRegion {
                    parts: vec![RegionPart::Segment(a, b)],
                };
                let cells = region.goal_cells(g, fallback);
                out.push(Candidate {
                    instance: GoalInstance::Opening(i),
                    region,
                    cells,
                });
            }
        }
    }
    for o in h.objects.iter().filter(|o| o.category == category) {
        let region = GoalRegion {
            parts: vec![RegionPart::Polygon(o.footprint.corners().to_vec())],
        };
        let cells = region.goal_cells(g, fallback);
        out.push(Candidate {
            instance: GoalInstance::Object(o.id),
            region,
            cells,
        });
    }
    out
}

fn resolve(spec: &GoalSpec, c: Candidate, g: &OccupancyGrid, threshold: f64) -> Option<ResolvedGoal> {
    if c.cells.is_empty() {
        return None;
    }
    let field = distance_field(g, &c.cells);
    Some(ResolvedGoal {
        spec: spec.clone(),
        instance: c.instance,
        region: c.region,
        cells: c.cells,
        field,
        threshold,
    })
}

fn success_threshold(goal: &GoalSpec, opts: &SampleOptions) -> f64 {
    match goal {
        GoalSpec::PointGoal { success_radius, .. } => *success_radius,
        _ => opts.success_distance,
    }
}

/// Resolve goals that do not depend on the start pose: fixed points, rooms,
/// and "any instance" object goals. Returns `None` for the others.
fn resolve_fixed(h: &House, g: &OccupancyGrid, goal: &GoalSpec, threshold: f64) -> Result<Option<ResolvedGoal>, NavError> {
    let c = match goal {
        GoalSpec::PointGoal { point: Some(p), .. } => {
            let region = GoalRegion::point(*p);
            let cells = region.goal_cells(g, threshold);
            Candidate {
                instance: GoalInstance::Point,
                region,
                cells,
            }
        }
        GoalSpec::PointGoal { point: None, .. } => return Ok(None),
        GoalSpec::RoomGoal { room } => {
            let rooms: Vec<_> = h.rooms.iter().filter(|r| r.category == *room).collect();
            if rooms.is_empty() {
                return Err(NavError::NoInstances(goal.describe()));
            }
            let region = GoalRegion {
                parts: rooms
                    .iter()
                    .map(|r| RegionPart::Polygon(r.floor_polygon.clone()))
                    .collect(),
            };
            let cells = region.goal_cells(g, threshold);
            Candidate {
                instance: GoalInstance::Rooms(rooms.iter().map(|r| r.id).collect()),
                region,
                cells,
            }
        }
        GoalSpec::ObjectGoal { category, select } => {
            if *select != ObjectSelect::Any {
                return Ok(None);
            }
            let instances = category_instances(h, *category, g, threshold);
            if instances.is_empty() {
                return Err(NavError::NoInstances(goal.describe()));
            }
            let mut parts = Vec::new();
            let mut cells = Vec::new();
            for c in &instances {
                parts.extend(c.region.parts.iter().cloned());
                cells.extend(c.cells.iter().copied());
            }
            cells.sort_unstable();
            cells.dedup();
            Candidate {
                instance: GoalInstance::AnyOf(*category),
                region: GoalRegion { parts },
                cells,
            }
        }
    };
    resolve(goal, c, g, threshold)
        .map(Some)
        .ok_or_else(|| NavError::GoalUnreachable(goal.describe()))
}

/// Resolve a goal that does not depend on the start pose.
pub fn resolve_goal(h: &House, g: &OccupancyGrid, goal: &GoalSpec, opts: &SampleOptions) -> Result<ResolvedGoal, NavError> {
    resolve_fixed(h, g, goal, success_threshold(goal, opts))?.ok_or_else(|| NavError::NeedsStart(goal.describe()))
}

/// Draw a free start pose and a goal it can reach, deterministically from `rng_seed`.
pub fn sample_start_goal(
    h: &House,
    g: &OccupancyGrid,
    goal: &GoalSpec,
    rng_seed: u64,
    opts: &SampleOptions,
) -> Result<StartGoal, NavError> {
    let mut rng = seed::rng_for(rng_seed, &[0x57a7]);
    let free: Vec<usize> = g.free_cells().collect();
    if free.is_empty() {
        return Err(NavError::NoFreeCells);
    }
    let threshold = success_threshold(goal, opts);

    let fixed = resolve_fixed(h, g, goal, threshold)?;
    let instances = match goal {
        GoalSpec::ObjectGoal { category, .. } if fixed.is_none() => category_instances(h, *category, g, threshold),
        _ => Vec::new(),
    };
    if fixed.is_none() && matches!(goal, GoalSpec::ObjectGoal { .. }) && instances.is_empty() {
        return Err(NavError::NoInstances(goal.describe()));
    }

    for _ in 0..opts.max_attempts {
        let start_cell = *free.choose(&mut rng).expect("free cells exist");
        let yaw = rng.random_range(0.0..TAU);
        let start_pos = g.spec.center(start_cell);

        let resolved = match (goal, &fixed) {
            (_, Some(f)) => f.clone(),
            (GoalSpec::PointGoal { .. }, None) => {
                let from_start = distance_field(g, &[start_cell]);
                let reachable: Vec<usize> = free
                    .iter()
                    .copied()
                    .filter(|&c| {
                        let d = from_start.get(c);
                        d.is_finite() && d >= opts.min_geodesic && g.spec.center(c).distance(start_pos) > threshold
                    })
                    .collect();
                let Some(&goal_cell) = reachable.choose(&mut rng) else {
                    continue;
                };
                let region = GoalRegion::point(g.spec.center(goal_cell));
                let cells = region.goal_cells(g, threshold);
                let c = Candidate {
                    instance: GoalInstance::Point,
                    region,
                    cells,
                };
                match resolve(goal, c, g, threshold) {
                    Some(r) => r,
                    None => continue,
                }
            }
            (GoalSpec::ObjectGoal { select, .. }, None) => {
                let pick = match select {
                    ObjectSelect::Random => rng.random_range(0..instances.len()),
                    _ => {
                        let from_start = distance_field(g, &[start_cell]);
                        let best = instances
                            .iter()
                            .enumerate()
                            .map(|(i, c)| {
                                let d = c.cells.iter().map(|&k| from_start.get(k)).fold(f64::INFINITY, f64::min);
                                (i, d)
                            })
                            .filter(|(_, d)| d.is_finite())
                            .fold(None, |best: Option<(usize, f64)>, c| match best {
                                Some(b) if b.1 <= c.1 => Some(b),
                                _ => Some(c),
                            });
                        match best {
                            Some((i, _)) => i,
                            None => continue,
                        }
                    }
                };
                let c = &instances[pick];
                let c = Candidate {
                    instance: c.instance.clone(),
                    region: c.region.clone(),
                    cells: c.cells.clone(),
                };
                match resolve(goal, c, g, threshold) {
                    Some(r) => r,
                    None => continue,
                }
            }
            (GoalSpec::RoomGoal { .. }, None) => unreachable!("room goals are resolved up front"),
        };

        if resolved.region.distance(start_pos) <= threshold {
            continue;
        }
        let d = resolved.field.get(start_cell);
        if !d.is_finite() || d < opts.min_geodesic {
            continue;
        }
        return Ok(StartGoal {
            start: AgentState::at_rest(start_pos, yaw),
            goal: resolved,
        });
    }
    Err(NavError::NoNavigablePair {
        goal: goal.describe(),
        attempts: opts.max_attempts,
    })
}
