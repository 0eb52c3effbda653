//! Ray casting against extruded 2.5D geometry: oriented boxes (wall pieces and
//! furniture) plus per-room floor and ceiling planes. Boxes are bucketed in a
//! uniform x–z grid and visited front to back with a 2D DDA walk.

use crate::geom::{point_in_polygon, Rect, Vec2};
use crate::scene::{default_albedo, Category, House};

/// Bucket size for the traversal grid (m).
const CELL: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct RenderBox {
    center: Vec2,
    axis_x: Vec2,
    axis_z: Vec2,
    half: Vec2,
    y0: f64,
    y1: f64,
    pub category: Category,
    pub instance: u32,
    pub albedo: u8,
    /// World-space bounds when the box is axis-aligned.
    aligned: Option<([f64; 3], [f64; 3])>,
}

impl RenderBox {
    /// Box with footprint `center ± half` in its local frame rotated by `yaw`,
    /// spanning heights `y0..y1`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(center: Vec2, half: Vec2, yaw: f64, y0: f64, y1: f64, category: Category, instance: u32, albedo: u8) -> Self {
        let (s, c) = yaw.sin_cos();
        let aligned = if s.abs() < 1e-12 || c.abs() < 1e-12 {
            let ext = if s.abs() < 1e-12 { half } else { Vec2::new(half.z, half.x) };
            Some((
                [center.x - ext.x, y0, center.z - ext.z],
                [center.x + ext.x, y1, center.z + ext.z],
            ))
        } else {
            None
        };
        RenderBox {
            center,
            axis_x: Vec2::left_of_yaw(yaw),
            axis_z: Vec2::from_yaw(yaw),
            half,
            y0,
            y1,
            category,
            instance,
            albedo,
            aligned,
        }
    }

    fn aabb(&self) -> Rect {
        if let Some((lo, hi)) = self.aligned {
            return Rect::new(Vec2::new(lo[0], lo[2]), Vec2::new(hi[0], hi[2]));
        }
        self.oriented_aabb()
    }

    fn oriented_aabb(&self) -> Rect {
        let ex = (self.axis_x.x * self.half.x).abs() + (self.axis_z.x * self.half.z).abs();
        let ez = (self.axis_x.z * self.half.x).abs() + (self.axis_z.z * self.half.z).abs();
        Rect::new(self.center - Vec2::new(ex, ez), self.center + Vec2::new(ex, ez))
    }

    /// Entry distance and outward normal, ignoring hits before `near` and rays
    /// starting inside the box.
    fn intersect(&self, o: [f64; 3], d: [f64; 3], near: f64) -> Option<(f64, [f64; 3])> {
        match self.aligned {
            Some((lo, hi)) => intersect_aligned(lo, hi, o, d, near),
            None => self.intersect_oriented(o, d, near),
        }
    }

    fn intersect_oriented(&self, o: [f64; 3], d: [f64; 3], near: f64) -> Option<(f64, [f64; 3])> {
        let rel = Vec2::new(o[0], o[2]) - self.center;
        let dxz = Vec2::new(d[0], d[2]);
        let lo = [rel.dot(self.axis_x), o[1], rel.dot(self.axis_z)];
        let ld = [dxz.dot(self.axis_x), d[1], dxz.dot(self.axis_z)];
        let bounds = [(-self.half.x, self.half.x), (self.y0, self.y1), (-self.half.z, self.half.z)];
        let mut t_enter = f64::NEG_INFINITY;
        let mut t_exit = f64::INFINITY;
        let mut enter_axis = 0;
        let mut enter_sign = 0.0;
        for axis in 0..3 {
            let (lo_b, hi_b) = bounds[axis];
            if ld[axis] == 0.0 {
                if lo[axis] < lo_b || lo[axis] > hi_b {
                    return None;
                }
                continue;
            }
            let inv = 1.0 / ld[axis];
            let (mut t0, mut t1) = ((lo_b - lo[axis]) * inv, (hi_b - lo[axis]) * inv);
            let sign = if ld[axis] > 0.0 { -1.0 } else { 1.0 };
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            if t0 > t_enter {
                t_enter = t0;
                enter_axis = axis;
                enter_sign = sign;
            }
            t_exit = t_exit.min(t1);
        }
        if t_enter > t_exit || t_enter < near || !t_enter.is_finite() {
            return None;
        }
        let n = match enter_axis {
            0 => [self.axis_x.x * enter_sign, 0.0, self.axis_x.z * enter_sign],
            1 => [0.0, enter_sign, 0.0],
            _ => [self.axis_z.x * enter_sign, 0.0, self.axis_z.z * enter_sign],
        };
        Some((t_enter, n))
    }
}

fn intersect_aligned(lo: [f64; 3], hi: [f64; 3], o: [f64; 3], d: [f64; 3], near: f64) -> Option<(f64, [f64; 3])> {
    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    let mut enter_axis = 0;
    for axis in 0..3 {
        if d[axis] == 0.0 {
            if o[axis] < lo[axis] || o[axis] > hi[axis] {
                return None;
            }
            continue;
        }
        let (a, b) = ((lo[axis] - o[axis]) / d[axis], (hi[axis] - o[axis]) / d[axis]);
        let (t0, t1) = if a <= b { (a, b) } else { (b, a) };
        if t0 > t_enter {
            t_enter = t0;
            enter_axis = axis;
        }
        if t1 < t_exit {
            t_exit = t1;
        }
        if t_enter > t_exit {
            return None;
        }
    }
    if t_enter < near || !t_enter.is_finite() {
        return None;
    }
    let mut n = [0.0; 3];
    n[enter_axis] = if d[enter_axis] > 0.0 { -1.0 } else { 1.0 };
    Some((t_enter, n))
}

#[derive(Debug, Clone)]
pub struct RenderRoom {
    polygon: Vec<Vec2>,
    bbox: Rect,
    ceiling: f64,
    instance: u32,
    floor_albedo: u8,
    ceiling_albedo: u8,
}

impl RenderRoom {
    pub fn new(polygon: Vec<Vec2>, ceiling: f64, instance: u32) -> Self {
        let bbox = polygon
            .iter()
            .skip(1)
            .fold(Rect::new(polygon[0], polygon[0]), |r, p| r.union(&Rect::new(*p, *p)));
        RenderRoom {
            polygon,
            bbox,
            ceiling,
            instance,
            floor_albedo: default_albedo(Category::Floor),
            ceiling_albedo: default_albedo(Category::Ceiling),
        }
    }

    fn contains(&self, p: Vec2) -> bool {
        self.bbox.contains(p) && point_in_polygon(p, &self.polygon)
    }
}

/// Nearest surface along a ray. `category == None` means nothing was hit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub normal: [f64; 3],
    pub category: Option<Category>,
    pub instance: u32,
    pub albedo: u8,
}

impl Hit {
    pub const SKY: Hit = Hit {
        t: f64::INFINITY,
        normal: [0.0; 3],
        category: None,
        instance: 0,
        albedo: 0,
    };

    pub fn is_hit(&self) -> bool {
        self.category.is_some()
    }

    /// Equal distances resolve to the lower instance id.
    fn farther_than(&self, t: f64, instance: u32) -> bool {
        t < self.t || (t == self.t && instance < self.instance)
    }
}

#[derive(Debug, Clone)]
pub struct RenderWorld {
    boxes: Vec<RenderBox>,
    rooms: Vec<RenderRoom>,
    origin: Vec2,
    nx: usize,
    nz: usize,
    /// CSR layout: boxes of cell `i` are `items[starts[i]..starts[i + 1]]`.
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl RenderWorld {
    pub fn new(boxes: Vec<RenderBox>, rooms: Vec<RenderRoom>) -> Self {
        let extent = boxes
            .iter()
            .map(|b| b.aabb())
            .chain(rooms.iter().map(|r| r.bbox))
            .reduce(|a, b| a.union(&b))
            .unwrap_or(Rect::new(Vec2::ZERO, Vec2::new(CELL, CELL)));
        let origin = extent.min;
        let nx = ((extent.width() / CELL).ceil() as usize).max(1);
        let nz = ((extent.depth() / CELL).ceil() as usize).max(1);
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); nx * nz];
        for (i, b) in boxes.iter().enumerate() {
            let bb = b.aabb();
            let cx = |x: f64| (((x - origin.x) / CELL).floor().max(0.0) as usize).min(nx - 1);
            let cz = |z: f64| (((z - origin.z) / CELL).floor().max(0.0) as usize).min(nz - 1);
            for z in cz(bb.min.z)..=cz(bb.max.z) {
                for x in cx(bb.min.x)..=cx(bb.max.x) {
                    buckets[z * nx + x].push(i as u32);
                }
            }
        }
        let mut starts = Vec::with_capacity(buckets.len() + 1);
        let mut items = Vec::new();
        starts.push(0);
        for b in buckets {
            items.extend(b);
            starts.push(items.len() as u32);
        }
        RenderWorld {
            boxes,
            rooms,
            origin,
            nx,
            nz,
            starts,
            items,
        }
    }

    /// Instance ids: walls `1..=W` in wall order, then rooms (floor and
    /// ceiling share the room's id), then objects.
    pub fn from_house(h: &House) -> Self {
        let mut boxes = Vec::new();
        for (wi, w) in h.walls.iter().enumerate() {
            let instance = wi as u32 + 1;
            let len = w.length();
            let Some(u) = (w.b - w.a).normalized() else { continue };
            let yaw = u.x.atan2(u.z);
            let ht = 0.5 * w.thickness;
            let mut holes: Vec<(f64, f64, f64, f64)> = h
                .openings
                .iter()
                .filter(|o| o.wall_ref == w.id)
                .map(|o| (o.span[0], o.span[1], o.bottom, o.top))
                .collect();
            holes.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut piece = |t0: f64, t1: f64, y0: f64, y1: f64| {
                if t1 <= t0 || y1 <= y0 {
                    return;
                }
                let s0 = t0 * len - if t0 == 0.0 { ht } else { 0.0 };
                let s1 = t1 * len + if t1 == 1.0 { ht } else { 0.0 };
                boxes.push(RenderBox::new(
                    w.a + u * (0.5 * (s0 + s1)),
                    Vec2::new(ht, 0.5 * (s1 - s0)),
                    yaw,
                    y0,
                    y1,
                    Category::Wall,
                    instance,
                    w.material.albedo,
                ));
            };
            let mut cursor = 0.0;
            for &(t0, t1, bottom, top) in &holes {
                piece(cursor, t0, 0.0, w.height);
                piece(t0, t1, 0.0, bottom);
                piece(t0, t1, top, w.height);
                cursor = f64::max(cursor, t1);
            }
            piece(cursor, 1.0, 0.0, w.height);
        }
        let room_base = h.walls.len() as u32 + 1;
        let rooms = h
            .rooms
            .iter()
            .enumerate()
            .map(|(i, r)| RenderRoom::new(r.floor_polygon.clone(), r.ceiling_height, room_base + i as u32))
            .collect();
        let object_base = room_base + h.rooms.len() as u32;
        for (i, o) in h.objects.iter().enumerate() {
            boxes.push(RenderBox::new(
                o.footprint.center,
                o.footprint.half_extents,
                o.footprint.yaw,
                o.base_height,
                o.top(),
                o.category,
                object_base + i as u32,
                o.material.albedo,
            ));
        }
        RenderWorld::new(boxes, rooms)
    }

    pub fn box_count(&self) -> usize {
        self.boxes.len()
    }

    /// Scratch mailbox for `cast`, one slot per box.
    pub fn scratch(&self) -> Vec<u32> {
        vec![u32::MAX; self.boxes.len()]
    }

    /// Nearest hit along the unit direction `d` from `o`. `ray_id` must differ
    /// between consecutive calls sharing `stamps`.
    pub fn cast(&self, o: [f64; 3], d: [f64; 3], near: f64, stamps: &mut [u32], ray_id: u32) -> Hit {
        let mut best = Hit::SKY;
        let at = |t: f64| Vec2::new(o[0] + d[0] * t, o[2] + d[2] * t);
        if d[1] < 0.0 {
            let t = -o[1] / d[1];
            if t >= near {
                let p = at(t);
                if let Some(r) = self.rooms.iter().find(|r| r.contains(p)) {
                    best = Hit {
                        t,
                        normal: [0.0, 1.0, 0.0],
                        category: Some(Category::Floor),
                        instance: r.instance,
                        albedo: r.floor_albedo,
                    };
                }
            }
        } else if d[1] > 0.0 {
            for r in &self.rooms {
                let t = (r.ceiling - o[1]) / d[1];
                if t >= near && t < best.t && r.contains(at(t)) {
                    best = Hit {
                        t,
                        normal: [0.0, -1.0, 0.0],
                        category: Some(Category::Ceiling),
                        instance: r.instance,
                        albedo: r.ceiling_albedo,
                    };
                }
            }
        }
        if self.boxes.is_empty() {
            return best;
        }

        // clip the planar ray against the bucket grid
        let (dx, dz) = (d[0], d[2]);
        let gmax = Vec2::new(
            self.origin.x + self.nx as f64 * CELL,
            self.origin.z + self.nz as f64 * CELL,
        );
        let mut t_in: f64 = 0.0;
        let mut t_out = f64::INFINITY;
        for (oc, dc, lo, hi) in [(o[0], dx, self.origin.x, gmax.x), (o[2], dz, self.origin.z, gmax.z)] {
            if dc == 0.0 {
                if oc < lo || oc > hi {
                    return best;
                }
            } else {
                let (a, b) = ((lo - oc) / dc, (hi - oc) / dc);
                t_in = t_in.max(a.min(b));
                t_out = t_out.min(a.max(b));
            }
        }
        if t_in > t_out || t_in >= best.t {
            return best;
        }
        let p = at(t_in);
        let clamp_cell = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
        let mut ix = clamp_cell((p.x - self.origin.x) / CELL, self.nx);
        let mut iz = clamp_cell((p.z - self.origin.z) / CELL, self.nz);
        let next_boundary = |i: usize, dc: f64, o0: f64, oc: f64| -> f64 {
            if dc > 0.0 {
                (o0 + (i + 1) as f64 * CELL - oc) / dc
            } else if dc < 0.0 {
                (o0 + i as f64 * CELL - oc) / dc
            } else {
                f64::INFINITY
            }
        };
        let mut t_max_x = next_boundary(ix, dx, self.origin.x, o[0]);
        let mut t_max_z = next_boundary(iz, dz, self.origin.z, o[2]);
        let t_delta_x = if dx != 0.0 { CELL / dx.abs() } else { f64::INFINITY };
        let t_delta_z = if dz != 0.0 { CELL / dz.abs() } else { f64::INFINITY };

        loop {
            let cell = iz * self.nx + ix;
            for &bi in &self.items[self.starts[cell] as usize..self.starts[cell + 1] as usize] {
                let slot = &mut stamps[bi as usize];
                if *slot == ray_id {
                    continue;
                }
                *slot = ray_id;
                let b = &self.boxes[bi as usize];
                if let Some((t, normal)) = b.intersect(o, d, near) {
                    if best.farther_than(t, b.instance) {
                        best = Hit {
                            t,
                            normal,
                            category: Some(b.category),
                            instance: b.instance,
                            albedo: b.albedo,
                        };
                    }
                }
            }
            let t_next = t_max_x.min(t_max_z);
            if best.t < t_next || t_next > t_out {
                break;
            }
            if t_max_x < t_max_z {
                if dx > 0.0 {
                    ix += 1;
                    if ix >= self.nx {
                        break;
                    }
                } else {
                    if ix == 0 {
                        break;
                    }
                    ix -= 1;
                }
                t_max_x += t_delta_x;
            } else {
                if dz > 0.0 {
                    iz += 1;
                    if iz >= self.nz {
                        break;
                    }
                } else {
                    if iz == 0 {
                        break;
                    }
                    iz -= 1;
                }
                t_max_z += t_delta_z;
            }
        }
        best
    }

    /// Reference cast that tests every box; used to check the bucketed walk.
    pub fn cast_brute_force(&self, o: [f64; 3], d: [f64; 3], near: f64) -> Hit {
        let mut stamps = self.scratch();
        let mut best = RenderWorld {
            boxes: Vec::new(),
            ..self.clone()
        }
        .cast(o, d, near, &mut stamps, 0);
        for b in &self.boxes {
            if let Some((t, normal)) = b.intersect(o, d, near) {
                if best.farther_than(t, b.instance) {
                    best = Hit {
                        t,
                        normal,
                        category: Some(b.category),
                        instance: b.instance,
                        albedo: b.albedo,
                    };
                }
            }
        }
        best
    }
}
