//! Procedural floor plans: recursive rectangle subdivision, doors on a random
//! spanning tree of the room adjacency graph, and rejection-sampled furniture.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geom::{Rect, Vec2};
use crate::nav;
use crate::seed;

use super::{
    default_material, validate_house, Category, Footprint, House, Opening, OpeningKind, Room,
    RoomClass, SceneError, SceneObject, Wall,
};

/// Layout coordinates are integers in units of 5 cm so that shared room edges
/// compare exactly.
const TICK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenParams {
    pub room_edge_min: f64,
    pub room_edge_max: f64,
    /// Per-room target floor area range (m²).
    pub room_area: [f64; 2],
    pub wall_height: f64,
    pub wall_thickness: f64,
    pub door_width: f64,
    /// Minimum distance from a door edge to the end of its wall.
    pub door_margin: f64,
    pub extra_door_prob: f64,
    pub window_prob: f64,
    pub objects_per_room: [u32; 2],
    pub clearance: f64,
    pub max_object_attempts: u32,
    /// Furniture keeps at least this far from door centers.
    pub door_keepout: f64,
    pub max_layout_attempts: u32,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            room_edge_min: 3.0,
            room_edge_max: 8.0,
            room_area: [16.0, 40.0],
            wall_height: 2.8,
            wall_thickness: 0.1,
            door_width: 0.9,
            door_margin: 0.3,
            extra_door_prob: 0.3,
            window_prob: 0.4,
            objects_per_room: [4, 12],
            clearance: 0.35,
            max_object_attempts: 200,
            door_keepout: 1.0,
            max_layout_attempts: 64,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct RectI {
    x0: i64,
    z0: i64,
    x1: i64,
    z1: i64,
}

impl RectI {
    fn w(&self) -> i64 {
        self.x1 - self.x0
    }
    fn d(&self) -> i64 {
        self.z1 - self.z0
    }
    fn area(&self) -> i64 {
        self.w() * self.d()
    }
    fn to_rect(self) -> Rect {
        Rect::new(
            Vec2::new(self.x0 as f64 * TICK, self.z0 as f64 * TICK),
            Vec2::new(self.x1 as f64 * TICK, self.z1 as f64 * TICK),
        )
    }
}

fn ticks(m: f64) -> i64 {
    (m / TICK).round() as i64
}

fn layout(rng: &mut ChaCha8Rng, n: usize, p: &GenParams) -> Option<Vec<RectI>> {
    let total: f64 = (0..n)
        .map(|_| rng.random_range(p.room_area[0]..=p.room_area[1]))
        .sum();
    let aspect = rng.random_range(1.0..1.5);
    let mut w = (total * aspect).sqrt();
    let mut d = total / w;
    if rng.random_bool(0.5) {
        std::mem::swap(&mut w, &mut d);
    }
    let mut rects = vec![RectI {
        x0: 0,
        z0: 0,
        x1: ticks(w),
        z1: ticks(d),
    }];
    let emin = ticks(p.room_edge_min);
    let emax = ticks(p.room_edge_max);
    while rects.len() < n {
        let pick = rects
            .iter()
            .enumerate()
            .filter(|(_, r)| r.w().max(r.d()) >= 2 * emin)
            .max_by_key(|(i, r)| (r.area(), std::cmp::Reverse(*i)))
            .map(|(i, _)| i)?;
        let r = rects[pick];
        let split_x = r.w() >= r.d();
        let len = if split_x { r.w() } else { r.d() };
        let at = ((len as f64 * rng.random_range(0.35..0.65)).round() as i64).clamp(emin, len - emin);
        let (a, b) = if split_x {
            (
                RectI { x1: r.x0 + at, ..r },
                RectI { x0: r.x0 + at, ..r },
            )
        } else {
            (
                RectI { z1: r.z0 + at, ..r },
                RectI { z0: r.z0 + at, ..r },
            )
        };
        rects[pick] = a;
        rects.push(b);
    }
    rects
        .iter()
        .all(|r| (emin..=emax).contains(&r.w()) && (emin..=emax).contains(&r.d()))
        .then_some(rects)
}

/// A maximal wall piece with the rooms it borders (one for exterior walls).
struct WallSeg {
    a: (i64, i64),
    b: (i64, i64),
    rooms: Vec<usize>,
}

fn wall_segments(rects: &[RectI]) -> Vec<WallSeg> {
    // line coordinate -> intervals (lo, hi, room); `vertical` lines have constant x.
    let mut out = Vec::new();
    for vertical in [true, false] {
        let mut lines: BTreeMap<i64, Vec<(i64, i64, usize)>> = BTreeMap::new();
        for (i, r) in rects.iter().enumerate() {
            if vertical {
                lines.entry(r.x0).or_default().push((r.z0, r.z1, i));
                lines.entry(r.x1).or_default().push((r.z0, r.z1, i));
            } else {
                lines.entry(r.z0).or_default().push((r.x0, r.x1, i));
                lines.entry(r.z1).or_default().push((r.x0, r.x1, i));
            }
        }
        for (c, intervals) in lines {
            let mut cuts: Vec<i64> = intervals.iter().flat_map(|&(lo, hi, _)| [lo, hi]).collect();
            cuts.sort_unstable();
            cuts.dedup();
            let mut current: Option<WallSeg> = None;
            for win in cuts.windows(2) {
                let (lo, hi) = (win[0], win[1]);
                let mut rooms: Vec<usize> = intervals
                    .iter()
                    .filter(|&&(a, b, _)| a <= lo && hi <= b)
                    .map(|&(_, _, r)| r)
                    .collect();
                rooms.sort_unstable();
                let pt = |t: i64| if vertical { (c, t) } else { (t, c) };
                match current.as_mut() {
                    Some(seg) if !rooms.is_empty() && seg.rooms == rooms && seg.b == pt(lo) => {
                        seg.b = pt(hi);
                    }
                    _ => {
                        if let Some(seg) = current.take() {
                            out.push(seg);
                        }
                        if !rooms.is_empty() {
                            current = Some(WallSeg {
                                a: pt(lo),
                                b: pt(hi),
                                rooms,
                            });
                        }
                    }
                }
            }
            out.extend(current);
        }
    }
    out
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

struct FurnitureKind {
    category: Category,
    half_x: [f64; 2],
    half_z: [f64; 2],
    height: [f64; 2],
    base: f64,
}

const FURNITURE: [FurnitureKind; 11] = [
    FurnitureKind { category: Category::Chair, half_x: [0.22, 0.30], half_z: [0.22, 0.30], height: [0.8, 1.0], base: 0.0 },
    FurnitureKind { category: Category::Table, half_x: [0.40, 0.80], half_z: [0.40, 0.60], height: [0.7, 0.8], base: 0.0 },
    FurnitureKind { category: Category::Sofa, half_x: [0.80, 1.10], half_z: [0.40, 0.50], height: [0.8, 0.9], base: 0.0 },
    FurnitureKind { category: Category::Bed, half_x: [0.70, 1.00], half_z: [0.90, 1.05], height: [0.5, 0.6], base: 0.0 },
    FurnitureKind { category: Category::Shelf, half_x: [0.40, 0.80], half_z: [0.15, 0.25], height: [1.6, 2.0], base: 0.0 },
    FurnitureKind { category: Category::Lamp, half_x: [0.15, 0.20], half_z: [0.15, 0.20], height: [1.4, 1.7], base: 0.0 },
    FurnitureKind { category: Category::Toilet, half_x: [0.20, 0.25], half_z: [0.30, 0.35], height: [0.40, 0.45], base: 0.0 },
    FurnitureKind { category: Category::Sink, half_x: [0.25, 0.35], half_z: [0.20, 0.25], height: [0.85, 0.9], base: 0.0 },
    // wall-unit television: its underside clears the contact sensor height
    FurnitureKind { category: Category::Tv, half_x: [0.40, 0.60], half_z: [0.10, 0.15], height: [0.5, 0.7], base: 0.45 },
    FurnitureKind { category: Category::Plant, half_x: [0.15, 0.25], half_z: [0.15, 0.25], height: [0.5, 1.2], base: 0.0 },
    // low boxes and rugs stay below the contact sensors
    FurnitureKind { category: Category::Misc, half_x: [0.20, 0.50], half_z: [0.20, 0.50], height: [0.10, 0.28], base: 0.0 },
];

fn centi(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Generate a single-floor house. Pure function of its arguments.
pub fn generate_house(
    seed: u64,
    n_rooms: usize,
    furnished: bool,
    params: &GenParams,
) -> Result<House, SceneError> {
    if n_rooms == 0 {
        return Err(SceneError::Generation {
            seed,
            reason: "n_rooms must be at least 1".into(),
        });
    }
    // furniture draws from its own stream so both variants share a floor plan
    let mut rng = seed::rng_for(seed, &[n_rooms as u64, 0x40_05e]);
    let mut last_reason = String::from("no attempts made");
    for attempt in 0..params.max_layout_attempts.max(1) {
        let furniture_rng = furnished.then(|| seed::rng_for(seed, &[n_rooms as u64, u64::from(attempt), 0xf0_71]));
        match try_generate(&mut rng, furniture_rng, seed, n_rooms, params) {
            Ok(h) => return Ok(h),
            Err(reason) => last_reason = reason,
        }
    }
    Err(SceneError::Generation {
        seed,
        reason: last_reason,
    })
}

fn try_generate(
    rng: &mut ChaCha8Rng,
    furniture_rng: Option<ChaCha8Rng>,
    seed: u64,
    n_rooms: usize,
    p: &GenParams,
) -> Result<House, String> {
    let rects = layout(rng, n_rooms, p).ok_or("room subdivision violated edge limits")?;
    let segs = wall_segments(&rects);
    let to_m = |(x, z): (i64, i64)| Vec2::new(x as f64 * TICK, z as f64 * TICK);

    let wall_material = default_material(Category::Wall);
    let walls: Vec<Wall> = segs
        .iter()
        .enumerate()
        .map(|(i, s)| Wall {
            id: i as u32,
            a: to_m(s.a),
            b: to_m(s.b),
            thickness: p.wall_thickness,
            height: p.wall_height,
            material: wall_material,
        })
        .collect();

    let min_door_wall = p.door_width + 2.0 * p.door_margin;
    // room pair -> longest shared wall long enough for a door
    let mut shared: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (i, s) in segs.iter().enumerate() {
        if let [a, b] = s.rooms[..] {
            if walls[i].length() + 1e-9 < min_door_wall {
                continue;
            }
            let e = shared.entry((a, b)).or_insert(i);
            if walls[i].length() > walls[*e].length() {
                *e = i;
            }
        }
    }
    let mut pairs: Vec<((usize, usize), usize)> = shared.into_iter().collect();
    pairs.shuffle(rng);

    let mut parent: Vec<usize> = (0..n_rooms).collect();
    let mut door_walls = Vec::new();
    let mut extra = Vec::new();
    for &((a, b), w) in &pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            door_walls.push(w);
        } else {
            extra.push(w);
        }
    }
    let root = find(&mut parent, 0);
    if (0..n_rooms).any(|i| find(&mut parent, i) != root) {
        return Err("room adjacency graph has no spanning tree".into());
    }
    for w in extra {
        if rng.random_bool(p.extra_door_prob) {
            door_walls.push(w);
        }
    }
    let exterior: Vec<usize> = (0..segs.len()).filter(|&i| segs[i].rooms.len() == 1).collect();
    if n_rooms == 1 {
        let candidates: Vec<usize> = exterior
            .iter()
            .copied()
            .filter(|&i| walls[i].length() + 1e-9 >= min_door_wall)
            .collect();
        let &w = candidates.choose(rng).ok_or("no exterior wall fits a door")?;
        door_walls.push(w);
    }
    door_walls.sort_unstable();

    let mut openings = Vec::new();
    for &w in &door_walls {
        let len = walls[w].length();
        let half = 0.5 * p.door_width;
        let lo = p.door_margin + half;
        let c = centi(rng.random_range(lo..=(len - lo).max(lo)));
        openings.push(Opening {
            wall_ref: w as u32,
            span: [(c - half) / len, (c + half) / len],
            bottom: 0.0,
            top: p.wall_height,
            kind: OpeningKind::Door,
        });
    }
    for &w in &exterior {
        let len = walls[w].length();
        if door_walls.contains(&w) || len < 2.5 || !rng.random_bool(p.window_prob) {
            continue;
        }
        let c = centi(rng.random_range(1.0..=len - 1.0));
        openings.push(Opening {
            wall_ref: w as u32,
            span: [(c - 0.5) / len, (c + 0.5) / len],
            bottom: 0.9,
            top: 2.0,
            kind: OpeningKind::Window,
        });
    }

    let mut classes = RoomClass::ALL;
    classes.shuffle(rng);
    let rooms: Vec<Room> = rects
        .iter()
        .enumerate()
        .map(|(i, r)| Room {
            id: i as u32,
            category: classes[i % classes.len()],
            floor_polygon: r.to_rect().corners_ccw().to_vec(),
            ceiling_height: p.wall_height,
        })
        .collect();

    let extent = rects
        .iter()
        .map(|r| r.to_rect())
        .reduce(|a, b| a.union(&b))
        .expect("at least one room");
    let mut house = House {
        id: format!("gen-s{seed}-r{n_rooms}-{}", if furniture_rng.is_some() { "f" } else { "e" }),
        bounds: extent.expanded(0.5 * p.wall_thickness),
        rooms,
        walls,
        openings,
        objects: Vec::new(),
    };

    if let Some(mut frng) = furniture_rng {
        furnish(&mut frng, &mut house, &rects, p);
    }
    ensure_navigable(&mut house)?;

    let violations = validate_house(&house);
    if !violations.is_empty() {
        return Err(format!("generated house failed validation: {}", violations[0]));
    }
    Ok(house)
}

fn furnish(rng: &mut ChaCha8Rng, house: &mut House, rects: &[RectI], p: &GenParams) {
    let doors: Vec<Vec2> = house
        .doors()
        .filter_map(|(_, o)| {
            let w = house.wall(o.wall_ref)?;
            Some(w.point_at(0.5 * (o.span[0] + o.span[1])))
        })
        .collect();
    let inset = 0.5 * p.wall_thickness + p.clearance;
    let mut next_id = 0u32;
    for r in rects {
        let room = r.to_rect();
        let count = rng.random_range(p.objects_per_room[0]..=p.objects_per_room[1]);
        // placed AABBs in this room: (center, half extents)
        let mut placed: Vec<(Vec2, Vec2)> = Vec::new();
        for _ in 0..count {
            let kind = FURNITURE.choose(rng).expect("catalog is non-empty");
            let half = Vec2::new(
                centi(rng.random_range(kind.half_x[0]..=kind.half_x[1])),
                centi(rng.random_range(kind.half_z[0]..=kind.half_z[1])),
            );
            let height = centi(rng.random_range(kind.height[0]..=kind.height[1]));
            let quarter = rng.random_range(0..4u32);
            let aabb_half = if quarter % 2 == 0 { half } else { Vec2::new(half.z, half.x) };
            let lo = room.min + Vec2::new(inset + aabb_half.x, inset + aabb_half.z);
            let hi = room.max - Vec2::new(inset + aabb_half.x, inset + aabb_half.z);
            if lo.x > hi.x || lo.z > hi.z {
                continue;
            }
            for _ in 0..p.max_object_attempts {
                let c = Vec2::new(
                    centi(rng.random_range(lo.x..=hi.x)),
                    centi(rng.random_range(lo.z..=hi.z)),
                );
                if c.x < lo.x || c.x > hi.x || c.z < lo.z || c.z > hi.z {
                    continue;
                }
                let clashes = placed.iter().any(|&(oc, oh)| {
                    (c.x - oc.x).abs() < aabb_half.x + oh.x + p.clearance
                        && (c.z - oc.z).abs() < aabb_half.z + oh.z + p.clearance
                });
                let near_door = doors.iter().any(|d| {
                    let dx = ((d.x - c.x).abs() - aabb_half.x).max(0.0);
                    let dz = ((d.z - c.z).abs() - aabb_half.z).max(0.0);
                    dx.hypot(dz) < p.door_keepout
                });
                if clashes || near_door {
                    continue;
                }
                placed.push((c, aabb_half));
                house.objects.push(SceneObject {
                    id: next_id,
                    category: kind.category,
                    footprint: Footprint {
                        center: c,
                        half_extents: half,
                        yaw: quarter as f64 * FRAC_PI_2,
                    },
                    base_height: kind.base,
                    height,
                    material: default_material(kind.category),
                });
                next_id += 1;
                break;
            }
        }
    }
}

/// Drop furniture (most recently placed first) until every door and every room
/// shares one free-space component of the default navigation grid.
fn ensure_navigable(house: &mut House) -> Result<(), String> {
    loop {
        let grid = nav::build_grid(house, nav::DEFAULT_AGENT_RADIUS, nav::DEFAULT_RESOLUTION)
            .map_err(|e| e.to_string())?;
        if nav::doors_and_rooms_connected(house, &grid) {
            return Ok(());
        }
        if house.objects.pop().is_none() {
            return Err("empty floor plan is not navigable".into());
        }
    }
}
