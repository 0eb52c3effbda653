//! Planar collision geometry: every obstacle is a convex polygon (or a
//! segment) grown by a rounding radius, extruded over a height interval.

use crate::geom::{closest_on_segment, Rect, Vec2};
use crate::scene::{House, OpeningKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstacleKind {
    Wall(u32),
    Object(u32),
    /// Edge of the house bounds.
    Boundary,
}

#[derive(Debug, Clone)]
pub struct Obstacle {
    /// Convex, counterclockwise; two points describe a segment.
    pub shape: Vec<Vec2>,
    pub rounding: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub kind: ObstacleKind,
    bbox: Rect,
}

/// Time of impact for a swept disc, with the contact normal pointing from the
/// obstacle toward the disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepHit {
    pub t: f64,
    pub normal: Vec2,
}

impl Obstacle {
    pub fn new(shape: Vec<Vec2>, rounding: f64, y_min: f64, y_max: f64, kind: ObstacleKind) -> Self {
        assert!(!shape.is_empty(), "obstacle shape needs at least one point");
        let mut bbox = Rect::new(shape[0], shape[0]);
        for p in &shape[1..] {
            bbox = bbox.union(&Rect::new(*p, *p));
        }
        Obstacle {
            shape,
            rounding,
            y_min,
            y_max,
            kind,
            bbox: bbox.expanded(rounding),
        }
    }

    pub fn segment(a: Vec2, b: Vec2, half_thickness: f64, y_min: f64, y_max: f64, kind: ObstacleKind) -> Self {
        Obstacle::new(vec![a, b], half_thickness, y_min, y_max, kind)
    }

    pub fn bbox(&self) -> Rect {
        self.bbox
    }

    pub fn spans_height(&self, y: f64) -> bool {
        self.y_min <= y && y <= self.y_max
    }

    fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.shape.len();
        let count = match n {
            1 => 0,
            2 => 2,
            _ => n,
        };
        (0..count).map(move |i| (self.shape[i], self.shape[(i + 1) % n]))
    }

    /// Signed distance from `p` to the obstacle surface (negative inside) and
    /// the unit normal pointing away from the obstacle.
    pub fn signed_distance(&self, p: Vec2) -> (f64, Vec2) {
        let n = self.shape.len();
        if n == 1 {
            let d = p - self.shape[0];
            let len = d.length();
            let normal = d.normalized().unwrap_or(Vec2::new(1.0, 0.0));
            return (len - self.rounding, normal);
        }
        let mut best = f64::INFINITY;
        let mut best_normal = Vec2::new(1.0, 0.0);
        let mut best_outward = best_normal;
        let mut inside = n >= 3;
        for (a, b) in self.edges() {
            let (q, _) = closest_on_segment(p, a, b);
            let d = p.distance(q);
            let outward = (b - a).perp_cw().normalized().unwrap_or(Vec2::new(1.0, 0.0));
            if n >= 3 && outward.dot(p - a) > 0.0 {
                inside = false;
            }
            if d < best {
                best = d;
                best_outward = outward;
                best_normal = (p - q).normalized().unwrap_or(outward);
            }
        }
        if inside {
            (-best - self.rounding, best_outward)
        } else {
            (best - self.rounding, best_normal)
        }
    }

    /// Earliest `t` in `[0, 1]` at which a disc of `radius` moving from `p` by
    /// `d` touches this obstacle while approaching it.
    pub fn sweep(&self, p: Vec2, d: Vec2, radius: f64) -> Option<SweepHit> {
        const BEHIND: f64 = 1e-7;
        let reach = radius + self.rounding;
        let mut best: Option<SweepHit> = None;
        let grazing = 1e-12 * d.length();
        let mut consider = |t: f64, normal: Vec2| {
            if d.dot(normal) >= -grazing {
                return;
            }
            if (0.0..=1.0).contains(&t) && best.is_none_or(|b| t < b.t) {
                best = Some(SweepHit { t, normal });
            }
        };
        for (a, b) in self.edges() {
            let Some(n) = (b - a).perp_cw().normalized() else {
                continue;
            };
            let dn = d.dot(n);
            if dn >= 0.0 {
                continue;
            }
            let sep = (p - a).dot(n) - reach;
            if sep < -BEHIND {
                continue;
            }
            let t = (sep / -dn).max(0.0);
            let q = p + d * t - n * reach;
            let ab = b - a;
            let u = (q - a).dot(ab) / ab.length_sq();
            if (0.0..=1.0).contains(&u) {
                consider(t, n);
            }
        }
        let dd = d.length_sq();
        if dd > 0.0 {
            for &v in &self.shape {
                let m = p - v;
                let b = m.dot(d);
                if b >= 0.0 {
                    continue;
                }
                let c = m.length_sq() - reach * reach;
                let t = if c <= 0.0 {
                    0.0
                } else {
                    let disc = b * b - dd * c;
                    if disc < 0.0 {
                        continue;
                    }
                    (-b - disc.sqrt()) / dd
                };
                let hit = p + d * t - v;
                let normal = hit.normalized().or_else(|| m.normalized()).unwrap_or(-d);
                consider(t, normal);
            }
        }
        best
    }
}

#[derive(Debug, Clone)]
pub struct CollisionWorld {
    pub obstacles: Vec<Obstacle>,
    pub bounds: Rect,
}

impl CollisionWorld {
    pub fn new(obstacles: Vec<Obstacle>, bounds: Rect) -> Self {
        CollisionWorld { obstacles, bounds }
    }

    /// Walls (minus door spans), furniture below `agent_height`, and the bounds edges.
    pub fn from_house(house: &House, agent_height: f64) -> Self {
        let mut obstacles = Vec::new();
        for w in &house.walls {
            let mut doors: Vec<[f64; 2]> = house
                .openings
                .iter()
                .filter(|o| o.wall_ref == w.id && o.kind == OpeningKind::Door)
                .map(|o| o.span)
                .collect();
            doors.sort_by(|a, b| a[0].total_cmp(&b[0]));
            for [t0, t1] in solid_spans(&doors) {
                obstacles.push(Obstacle::segment(
                    w.point_at(t0),
                    w.point_at(t1),
                    0.5 * w.thickness,
                    0.0,
                    w.height,
                    ObstacleKind::Wall(w.id),
                ));
            }
        }
        for o in &house.objects {
            if o.base_height >= agent_height {
                continue;
            }
            obstacles.push(Obstacle::new(
                o.footprint.corners().to_vec(),
                0.0,
                o.base_height,
                o.top(),
                ObstacleKind::Object(o.id),
            ));
        }
        let c = house.bounds.corners_ccw();
        for i in 0..4 {
            obstacles.push(Obstacle::segment(
                c[i],
                c[(i + 1) % 4],
                0.0,
                0.0,
                f64::INFINITY,
                ObstacleKind::Boundary,
            ));
        }
        CollisionWorld::new(obstacles, house.bounds)
    }

    /// Smallest signed clearance between a disc center and any obstacle surface.
    pub fn clearance(&self, p: Vec2) -> f64 {
        self.obstacles
            .iter()
            .map(|o| o.signed_distance(p).0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Earliest obstacle hit along `p -> p + d` for a disc of `radius`.
    pub fn sweep(&self, p: Vec2, d: Vec2, radius: f64) -> Option<SweepHit> {
        let path = Rect::new(
            Vec2::new(p.x.min(p.x + d.x), p.z.min(p.z + d.z)),
            Vec2::new(p.x.max(p.x + d.x), p.z.max(p.z + d.z)),
        )
        .expanded(radius);
        let mut best: Option<SweepHit> = None;
        for o in &self.obstacles {
            let bb = o.bbox();
            if bb.max.x < path.min.x || bb.min.x > path.max.x || bb.max.z < path.min.z || bb.min.z > path.max.z {
                continue;
            }
            if let Some(h) = o.sweep(p, d, radius) {
                if best.is_none_or(|b| h.t < b.t) {
                    best = Some(h);
                }
            }
        }
        best
    }
}

/// Complement of sorted, possibly overlapping spans within [0, 1].
fn solid_spans(holes: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    let mut cursor = 0.0;
    for &[t0, t1] in holes {
        if t0 > cursor {
            out.push([cursor, t0]);
        }
        cursor = f64::max(cursor, t1);
    }
    if cursor < 1.0 {
        out.push([cursor, 1.0]);
    }
    out
}
