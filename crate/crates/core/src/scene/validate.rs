use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::geom::{point_in_polygon, polygon_is_simple, signed_area, Vec2};

use super::{House, OpeningKind};

/// The entity a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entity {
    House,
    Room(u32),
    Wall(u32),
    /// Openings carry no id of their own; they are addressed by list index.
    Opening(usize),
    Object(u32),
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::House => write!(f, "house"),
            Entity::Room(id) => write!(f, "room {id}"),
            Entity::Wall(id) => write!(f, "wall {id}"),
            Entity::Opening(i) => write!(f, "opening #{i}"),
            Entity::Object(id) => write!(f, "object {id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub entity: Entity,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.message)
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Check every house invariant; an empty list means the house is valid.
pub fn validate_house(h: &House) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |entity, message: String| out.push(Violation { entity, message });

    if h.bounds.is_degenerate() {
        push(Entity::House, "bounds are degenerate".into());
    }
    if h.rooms.is_empty() {
        push(Entity::House, "house has no rooms".into());
    }

    let mut seen = HashSet::new();
    for r in &h.rooms {
        if !seen.insert(r.id) {
            push(Entity::Room(r.id), "duplicate room id".into());
        }
        let poly = &r.floor_polygon;
        if poly.iter().any(|p| !p.is_finite()) || !polygon_is_simple(poly) {
            push(Entity::Room(r.id), "floor polygon is not simple".into());
        } else if signed_area(poly) <= 0.0 {
            push(
                Entity::Room(r.id),
                "floor polygon is not counterclockwise with positive area".into(),
            );
        }
        if !positive(r.ceiling_height) {
            push(Entity::Room(r.id), "ceiling height must be positive".into());
        }
    }

    let mut seen = HashSet::new();
    for w in &h.walls {
        if !seen.insert(w.id) {
            push(Entity::Wall(w.id), "duplicate wall id".into());
        }
        if !w.a.is_finite() || !w.b.is_finite() || w.a == w.b {
            push(Entity::Wall(w.id), "wall segment is degenerate".into());
        }
        if !positive(w.thickness) || !positive(w.height) {
            push(Entity::Wall(w.id), "wall thickness and height must be positive".into());
        }
    }

    for (i, o) in h.openings.iter().enumerate() {
        let Some(w) = h.wall(o.wall_ref) else {
            push(
                Entity::Opening(i),
                format!("wall_ref {} does not resolve to a wall", o.wall_ref),
            );
            continue;
        };
        let [t0, t1] = o.span;
        if !(t0 >= 0.0 && t0 < t1 && t1 <= 1.0) {
            push(Entity::Opening(i), format!("span [{t0}, {t1}] is not within 0 <= t0 < t1 <= 1"));
        }
        if !(o.bottom.is_finite() && o.bottom >= 0.0 && o.bottom < o.top && o.top <= w.height) {
            push(
                Entity::Opening(i),
                format!("requires 0 <= bottom < top <= wall height ({})", w.height),
            );
        }
        if o.kind == OpeningKind::Door && o.bottom != 0.0 {
            push(Entity::Opening(i), "doors must start at the floor".into());
        }
    }

    let mut seen = HashSet::new();
    for obj in &h.objects {
        if !seen.insert(obj.id) {
            push(Entity::Object(obj.id), "duplicate object id".into());
        }
        let fp = &obj.footprint;
        if !positive(fp.half_extents.x) || !positive(fp.half_extents.z) {
            push(Entity::Object(obj.id), "footprint half-extents must be positive".into());
        }
        if !positive(obj.height) || !(obj.base_height.is_finite() && obj.base_height >= 0.0) {
            push(Entity::Object(obj.id), "height must be positive, base height non-negative".into());
        }
        if !fp.center.is_finite() || !fp.yaw.is_finite() {
            push(Entity::Object(obj.id), "footprint pose is not finite".into());
        } else if fp.corners().iter().any(|c| !h.bounds.contains(*c)) {
            push(Entity::Object(obj.id), "footprint extends outside house bounds".into());
        }
    }

    if out.is_empty() {
        if let Some(v) = connectivity_violation(h) {
            out.push(v);
        }
    }
    out
}

/// Rooms on the two sides of every door, as (door index, room ids).
pub(crate) fn door_links(h: &House) -> Vec<(usize, Vec<u32>)> {
    h.doors()
        .filter_map(|(i, o)| {
            let w = h.wall(o.wall_ref)?;
            let mid = w.point_at(0.5 * (o.span[0] + o.span[1]));
            let n = (w.b - w.a).perp_cw().normalized()?;
            let probe = 0.5 * w.thickness + 0.05;
            let rooms: Vec<u32> = [mid + n * probe, mid - n * probe]
                .iter()
                .filter_map(|p| room_containing(h, *p))
                .collect();
            Some((i, rooms))
        })
        .collect()
}

fn room_containing(h: &House, p: Vec2) -> Option<u32> {
    h.rooms
        .iter()
        .find(|r| point_in_polygon(p, &r.floor_polygon))
        .map(|r| r.id)
}

fn connectivity_violation(h: &House) -> Option<Violation> {
    if h.rooms.len() < 2 {
        return None;
    }
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for (_, rooms) in door_links(h) {
        if let [a, b] = rooms[..] {
            if a != b {
                adj.entry(a).or_default().push(b);
                adj.entry(b).or_default().push(a);
            }
        }
    }
    let start = h.rooms[0].id;
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(r) = queue.pop_front() {
        for &n in adj.get(&r).into_iter().flatten() {
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    let unreachable: Vec<String> = h
        .rooms
        .iter()
        .filter(|r| !seen.contains(&r.id))
        .map(|r| r.id.to_string())
        .collect();
    (!unreachable.is_empty()).then(|| Violation {
        entity: Entity::House,
        message: format!(
            "door-adjacency graph is disconnected: rooms [{}] unreachable from room {start}",
            unreachable.join(", ")
        ),
    })
}
