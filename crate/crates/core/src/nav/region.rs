use crate::geom::{closest_on_segment, point_in_polygon, Rect, Vec2};

use super::grid::OccupancyGrid;

#[derive(Debug, Clone, PartialEq)]
pub enum RegionPart {
    Point(Vec2),
    Segment(Vec2, Vec2),
    /// Simple polygon, counterclockwise.
    Polygon(Vec<Vec2>),
}

impl RegionPart {
    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        match self {
            RegionPart::Point(q) => *q,
            RegionPart::Segment(a, b) => closest_on_segment(p, *a, *b).0,
            RegionPart::Polygon(poly) => {
                if point_in_polygon(p, poly) {
                    return p;
                }
                let n = poly.len();
                let mut best = (f64::INFINITY, p);
                for i in 0..n {
                    let q = closest_on_segment(p, poly[i], poly[(i + 1) % n]).0;
                    let d = q.distance(p);
                    if d < best.0 {
                        best = (d, q);
                    }
                }
                best.1
            }
        }
    }

    fn bbox(&self) -> Rect {
        let pts: Vec<Vec2> = match self {
            RegionPart::Point(q) => vec![*q],
            RegionPart::Segment(a, b) => vec![*a, *b],
            RegionPart::Polygon(poly) => poly.clone(),
        };
        pts.iter()
            .skip(1)
            .fold(Rect::new(pts[0], pts[0]), |r, p| r.union(&Rect::new(*p, *p)))
    }
}

/// Navigation target: a union of points, segments and polygons.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalRegion {
    pub parts: Vec<RegionPart>,
}

impl GoalRegion {
    pub fn point(p: Vec2) -> Self {
        GoalRegion {
            parts: vec![RegionPart::Point(p)],
        }
    }

    /// Closest point of the region to `p` and its distance.
    pub fn closest(&self, p: Vec2) -> (Vec2, f64) {
        self.parts
            .iter()
            .map(|part| {
                let q = part.closest_point(p);
                (q, q.distance(p))
            })
            .fold((p, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
    }

    pub fn distance(&self, p: Vec2) -> f64 {
        self.closest(p).1
    }

    /// Goal cells on `g`: free cells whose centers lie within half a cell
    /// diagonal of the region. Parts that cover no free cell (furniture is
    /// inflated away) fall back to free cells within `fallback_radius`.
    pub fn goal_cells(&self, g: &OccupancyGrid, fallback_radius: f64) -> Vec<usize> {
        let spec = g.spec;
        let touch = 0.5 * spec.resolution * std::f64::consts::SQRT_2;
        let mut out = Vec::new();
        for part in &self.parts {
            let mut found = cells_within(g, part, touch);
            if found.is_empty() {
                found = cells_within(g, part, fallback_radius.max(touch));
            }
            out.extend(found);
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn cells_within(g: &OccupancyGrid, part: &RegionPart, radius: f64) -> Vec<usize> {
    let spec = g.spec;
    let bb = part.bbox().expanded(radius);
    let res = spec.resolution;
    let lo_x = ((bb.min.x - spec.origin.x) / res - 0.5).floor().max(0.0) as usize;
    let lo_z = ((bb.min.z - spec.origin.z) / res - 0.5).floor().max(0.0) as usize;
    let hi_x = ((bb.max.x - spec.origin.x) / res - 0.5).ceil();
    let hi_z = ((bb.max.z - spec.origin.z) / res - 0.5).ceil();
    if hi_x < 0.0 || hi_z < 0.0 {
        return Vec::new();
    }
    let hi_x = (hi_x as usize).min(spec.width.saturating_sub(1));
    let hi_z = (hi_z as usize).min(spec.height.saturating_sub(1));
    let mut out = Vec::new();
    for z in lo_z..=hi_z {
        for x in lo_x..=hi_x {
            let i = spec.index(x, z);
            if g.is_free(i) {
                let c = spec.center(i);
                if part.closest_point(c).distance(c) <= radius {
                    out.push(i);
                }
            }
        }
    }
    out
}
