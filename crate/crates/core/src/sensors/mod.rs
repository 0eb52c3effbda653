//! Observation synthesis: camera frames from the raycaster, contact flags from
//! physics, and the goal measurement vector.

mod measure;
mod raycast;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::physics::{AgentConfig, AgentState, ContactReading};
use crate::seed;

pub use measure::{measurements, Kinematics, Measurements};
pub use raycast::{Hit, RenderBox, RenderRoom, RenderWorld};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SensorError {
    #[error("sensor {name:?}: {reason}")]
    Invalid { name: String, reason: String },
    #[error("duplicate sensor name {0:?}")]
    DuplicateName(String),
    #[error("no sensors configured")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorKind {
    Color,
    Depth,
    Normal,
    Semantic,
    Instance,
    Contact,
    Measurements,
}

impl SensorKind {
    pub fn is_camera(self) -> bool {
        !matches!(self, SensorKind::Contact | SensorKind::Measurements)
    }

    pub fn channels(self) -> u32 {
        match self {
            SensorKind::Normal => 3,
            _ => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SensorKind::Color => "color",
            SensorKind::Depth => "depth",
            SensorKind::Normal => "normal",
            SensorKind::Semantic => "semantic",
            SensorKind::Instance => "instance",
            SensorKind::Contact => "contact",
            SensorKind::Measurements => "measurements",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    #[default]
    Byte,
    Float,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec {
    pub name: String,
    pub kind: SensorKind,
    /// Camera position relative to the eye point: x left, y up, z forward (m).
    #[serde(default)]
    pub offset: [f64; 3],
    /// Yaw and pitch relative to the agent view (rad).
    #[serde(default)]
    pub orientation: [f64; 2],
    #[serde(default = "default_resolution")]
    pub resolution: [u32; 2],
    /// Horizontal field of view (rad).
    #[serde(default = "default_fov")]
    pub fov: f64,
    #[serde(default = "default_depth_range")]
    pub depth_range: [f64; 2],
    #[serde(default)]
    pub encoding: Encoding,
    #[serde(default)]
    pub noise_stddev: f64,
}

fn default_resolution() -> [u32; 2] {
    [84, 84]
}

fn default_fov() -> f64 {
    std::f64::consts::FRAC_PI_2
}

fn default_depth_range() -> [f64; 2] {
    [0.0, 10.0]
}

impl SensorSpec {
    pub fn new(name: &str, kind: SensorKind) -> Self {
        SensorSpec {
            name: name.to_string(),
            kind,
            offset: [0.0; 3],
            orientation: [0.0; 2],
            resolution: default_resolution(),
            fov: default_fov(),
            depth_range: default_depth_range(),
            encoding: Encoding::Byte,
            noise_stddev: 0.0,
        }
    }

    pub fn with_resolution(mut self, w: u32, h: u32) -> Self {
        self.resolution = [w, h];
        self
    }

    pub fn with_encoding(mut self, encoding: Encoding) -> Self {
        self.encoding = encoding;
        self
    }

    pub fn validate(&self) -> Result<(), SensorError> {
        let bad = |reason: String| {
            Err(SensorError::Invalid {
                name: self.name.clone(),
                reason,
            })
        };
        if self.name.is_empty() {
            return bad("name must not be empty".into());
        }
        if !self.kind.is_camera() {
            return Ok(());
        }
        let [w, h] = self.resolution;
        if w == 0 || h == 0 {
            return bad(format!("resolution {w}x{h} must be at least 1x1"));
        }
        if u64::from(w) * u64::from(h) > 1 << 24 {
            return bad(format!("resolution {w}x{h} is too large"));
        }
        if !(self.fov > 0.0 && self.fov < std::f64::consts::PI) {
            return bad(format!("fov {} must lie in (0, pi)", self.fov));
        }
        let [near, far] = self.depth_range;
        if !(near >= 0.0 && near < far && far.is_finite()) {
            return bad(format!("depth range [{near}, {far}] must satisfy 0 <= near < far"));
        }
        if !(self.noise_stddev >= 0.0 && self.noise_stddev.is_finite()) {
            return bad(format!("noise_stddev {} must be non-negative", self.noise_stddev));
        }
        if !(self.offset.iter().chain(&self.orientation).all(|v| v.is_finite())) {
            return bad("offset and orientation must be finite".into());
        }
        Ok(())
    }
}

/// Grayscale and depth cameras at 84×84, contact sensors and measurements.
pub fn default_sensors() -> Vec<SensorSpec> {
    vec![
        SensorSpec::new("color", SensorKind::Color),
        SensorSpec::new("depth", SensorKind::Depth),
        SensorSpec::new("contact", SensorKind::Contact),
        SensorSpec::new("measurements", SensorKind::Measurements),
    ]
}

pub fn validate_sensors(specs: &[SensorSpec]) -> Result<(), SensorError> {
    if specs.is_empty() {
        return Err(SensorError::Empty);
    }
    let mut seen = std::collections::HashSet::new();
    for s in specs {
        s.validate()?;
        if !seen.insert(s.name.as_str()) {
            return Err(SensorError::DuplicateName(s.name.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrameData {
    Byte(Vec<u8>),
    Float(Vec<f32>),
}

/// Row-major image, top-left origin, channels interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraFrame {
    pub name: String,
    pub kind: SensorKind,
    pub width: u32,
    pub height: u32,
    pub channels: u32,
    pub data: FrameData,
}

impl CameraFrame {
    /// Raw buffer; float samples are little-endian f32.
    pub fn to_bytes(&self) -> Vec<u8> {
        match &self.data {
            FrameData::Byte(b) => b.clone(),
            FrameData::Float(f) => f.iter().flat_map(|v| v.to_le_bytes()).collect(),
        }
    }

    pub fn bytes(&self) -> Option<&[u8]> {
        match &self.data {
            FrameData::Byte(b) => Some(b),
            FrameData::Float(_) => None,
        }
    }

    pub fn floats(&self) -> Option<&[f32]> {
        match &self.data {
            FrameData::Float(f) => Some(f),
            FrameData::Byte(_) => None,
        }
    }

    pub fn encoding(&self) -> Encoding {
        match self.data {
            FrameData::Byte(_) => Encoding::Byte,
            FrameData::Float(_) => Encoding::Float,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reading {
    Frame(CameraFrame),
    Contact(ContactReading),
    Measurements(Measurements),
}

/// One reading per configured sensor, in configuration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub readings: Vec<(String, Reading)>,
}

impl Observation {
    pub fn get(&self, name: &str) -> Option<&Reading> {
        self.readings.iter().find(|(n, _)| n == name).map(|(_, r)| r)
    }

    pub fn frame(&self, name: &str) -> Option<&CameraFrame> {
        match self.get(name)? {
            Reading::Frame(f) => Some(f),
            _ => None,
        }
    }

    pub fn contact(&self) -> Option<&ContactReading> {
        self.readings.iter().find_map(|(_, r)| match r {
            Reading::Contact(c) => Some(c),
            _ => None,
        })
    }

    pub fn measurements(&self) -> Option<&Measurements> {
        self.readings.iter().find_map(|(_, r)| match r {
            Reading::Measurements(m) => Some(m),
            _ => None,
        })
    }
}

/// Pinhole camera. Image x runs to the camera's right, image y downwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub origin: [f64; 3],
    pub forward: [f64; 3],
    pub right: [f64; 3],
    pub up: [f64; 3],
    tan_x: f64,
    tan_y: f64,
    pub width: u32,
    pub height: u32,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl Camera {
    pub fn new(state: &AgentState, agent: &AgentConfig, spec: &SensorSpec) -> Self {
        let fwd = state.heading();
        let left = state.left();
        let p = state.position + left * spec.offset[0] + fwd * spec.offset[2];
        let yaw = state.yaw + spec.orientation[0];
        let pitch = state.pitch + spec.orientation[1];
        let (sy, cy) = yaw.sin_cos();
        let (sp, cp) = pitch.sin_cos();
        let forward = [sy * cp, sp, cy * cp];
        let right = [-cy, 0.0, sy];
        let up = cross(right, forward);
        let [w, h] = spec.resolution;
        let tan_x = (0.5 * spec.fov).tan();
        Camera {
            origin: [p.x, agent.eye_height + spec.offset[1], p.z],
            forward,
            right,
            up,
            tan_x,
            tan_y: tan_x * f64::from(h) / f64::from(w),
            width: w,
            height: h,
        }
    }

    /// Unit direction through the center of pixel (`px`, `py`).
    pub fn ray(&self, px: u32, py: u32) -> [f64; 3] {
        let sx = (2.0 * (f64::from(px) + 0.5) / f64::from(self.width) - 1.0) * self.tan_x;
        let sy = (1.0 - 2.0 * (f64::from(py) + 0.5) / f64::from(self.height)) * self.tan_y;
        let d = [
            self.forward[0] + self.right[0] * sx + self.up[0] * sy,
            self.forward[1] + self.right[1] * sx + self.up[1] * sy,
            self.forward[2] + self.right[2] * sx + self.up[2] * sy,
        ];
        let n = dot(d, d).sqrt();
        [d[0] / n, d[1] / n, d[2] / n]
    }

    fn same_rays(&self, o: &Camera) -> bool {
        self == o
    }
}

/// Per-pixel nearest hits for a camera.
pub fn cast_frame(world: &RenderWorld, cam: &Camera, near: f64) -> Vec<Hit> {
    let mut stamps = world.scratch();
    let mut out = Vec::with_capacity(cam.width as usize * cam.height as usize);
    let mut ray_id = 0u32;
    for py in 0..cam.height {
        for px in 0..cam.width {
            out.push(world.cast(cam.origin, cam.ray(px, py), near, &mut stamps, ray_id));
            ray_id = ray_id.wrapping_add(1);
            if ray_id == u32::MAX {
                stamps.fill(u32::MAX);
                ray_id = 0;
            }
        }
    }
    out
}

/// Encode one camera frame from its hits. `noise_seed` keys the Gaussian
/// noise stream; noise perturbs color, depth and normal samples of surface
/// pixels and leaves labels and sky pixels exact.
pub fn encode_frame(spec: &SensorSpec, cam: &Camera, hits: &[Hit], noise_seed: u64) -> CameraFrame {
    let [w, h] = spec.resolution;
    let far = spec.depth_range[1];
    let channels = spec.kind.channels();
    let mut rng = seed::rng(noise_seed);
    let normal = (spec.noise_stddev > 0.0).then(|| Normal::new(0.0, spec.noise_stddev).expect("validated stddev"));
    let mut noise = move || normal.as_ref().map_or(0.0, |n| n.sample(&mut rng));
    let n = hits.len() * channels as usize;
    let byte = spec.encoding == Encoding::Byte;
    let mut bytes = Vec::with_capacity(if byte { n } else { 0 });
    let mut floats = Vec::with_capacity(if byte { 0 } else { n });
    for (i, hit) in hits.iter().enumerate() {
        match spec.kind {
            SensorKind::Color => {
                let v = if hit.is_hit() {
                    let d = cam.ray(i as u32 % w, i as u32 / w);
                    let lambert = (-dot(hit.normal, d)).max(0.0);
                    (f64::from(hit.albedo) * lambert + noise()).clamp(0.0, 255.0)
                } else {
                    0.0
                };
                if byte {
                    bytes.push(v.floor() as u8);
                } else {
                    floats.push((v / 255.0) as f32);
                }
            }
            SensorKind::Depth => {
                let d = if hit.is_hit() { (hit.t + noise()).clamp(0.0, far) } else { far };
                if byte {
                    bytes.push(depth_byte(d, far));
                } else {
                    floats.push(d as f32);
                }
            }
            SensorKind::Normal => {
                for c in 0..3 {
                    let v = if hit.is_hit() { (hit.normal[c] + noise()).clamp(-1.0, 1.0) } else { 0.0 };
                    if byte {
                        bytes.push(if hit.is_hit() { normal_byte(v) } else { 0 });
                    } else {
                        floats.push(v as f32);
                    }
                }
            }
            SensorKind::Semantic => {
                let v = hit.category.map_or(0, |c| c.index());
                if byte {
                    bytes.push(v);
                } else {
                    floats.push(f32::from(v));
                }
            }
            SensorKind::Instance => {
                if byte {
                    bytes.push(instance_byte(hit.instance));
                } else {
                    floats.push(hit.instance as f32);
                }
            }
            SensorKind::Contact | SensorKind::Measurements => unreachable!("not a camera sensor"),
        }
    }
    CameraFrame {
        name: spec.name.clone(),
        kind: spec.kind,
        width: w,
        height: h,
        channels,
        data: if byte { FrameData::Byte(bytes) } else { FrameData::Float(floats) },
    }
}

/// `floor(clamp(d, 0, far) / far * 255)`.
pub fn depth_byte(d: f64, far: f64) -> u8 {
    (d.clamp(0.0, far) / far * 255.0).floor() as u8
}

/// Maps [-1, 1] onto [0, 255].
pub fn normal_byte(v: f64) -> u8 {
    ((v.clamp(-1.0, 1.0) + 1.0) * 127.5).floor().min(255.0) as u8
}

/// Instance ids wrap into 1..=255; 0 stays sky.
pub fn instance_byte(id: u32) -> u8 {
    if id == 0 {
        0
    } else {
        (1 + (id - 1) % 255) as u8
    }
}

/// Render a single camera sensor.
pub fn render(world: &RenderWorld, state: &AgentState, agent: &AgentConfig, spec: &SensorSpec, noise_seed: u64) -> CameraFrame {
    let cam = Camera::new(state, agent, spec);
    let hits = cast_frame(world, &cam, spec.depth_range[0]);
    encode_frame(spec, &cam, &hits, noise_seed)
}

/// Everything `observe` reads besides the render geometry.
#[derive(Debug, Clone, Copy)]
pub struct SensorInputs<'a> {
    pub state: &'a AgentState,
    pub agent: &'a AgentConfig,
    pub contact: ContactReading,
    pub measurements: Measurements,
    /// Seed of the per-step noise streams.
    pub noise_seed: u64,
}

/// Produce one reading per spec. Cameras with identical poses and intrinsics
/// share one ray cast.
pub fn observe(world: &RenderWorld, specs: &[SensorSpec], inputs: SensorInputs<'_>) -> Observation {
    let mut cache: Vec<(Camera, f64, Vec<Hit>)> = Vec::new();
    let readings = specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let reading = match spec.kind {
                SensorKind::Contact => Reading::Contact(inputs.contact),
                SensorKind::Measurements => Reading::Measurements(inputs.measurements),
                _ => {
                    let cam = Camera::new(inputs.state, inputs.agent, spec);
                    let near = spec.depth_range[0];
                    let idx = match cache.iter().position(|(c, n, _)| c.same_rays(&cam) && *n == near) {
                        Some(k) => k,
                        None => {
                            let hits = cast_frame(world, &cam, near);
                            cache.push((cam, near, hits));
                            cache.len() - 1
                        }
                    };
                    let noise_seed = seed::mix(inputs.noise_seed, &[i as u64]);
                    Reading::Frame(encode_frame(spec, &cam, &cache[idx].2, noise_seed))
                }
            };
            (spec.name.clone(), reading)
        })
        .collect();
    Observation { readings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;
    use crate::scene::Category;

    fn one_wall(distance: f64) -> RenderWorld {
        // wall face at z = distance, facing -z
        let b = RenderBox::new(
            Vec2::new(0.0, distance + 0.05),
            Vec2::new(20.0, 0.05),
            0.0,
            0.0,
            3.0,
            Category::Wall,
            1,
            200,
        );
        RenderWorld::new(vec![b], Vec::new())
    }

    #[test]
    fn center_depth_of_flat_wall() {
        let w = one_wall(3.0);
        let state = AgentState::at_rest(Vec2::ZERO, 0.0);
        let agent = AgentConfig::default();
        let spec = SensorSpec::new("d", SensorKind::Depth).with_resolution(1, 1);
        let f = render(&w, &state, &agent, &spec, 0);
        assert_eq!(f.bytes().unwrap(), &[76]);
        let far = one_wall(12.0);
        assert_eq!(render(&far, &state, &agent, &spec, 0).bytes().unwrap(), &[255]);
    }

    #[test]
    fn normal_and_semantic_face_camera() {
        let w = one_wall(3.0);
        let state = AgentState::at_rest(Vec2::ZERO, 0.0);
        let agent = AgentConfig::default();
        let n = render(&w, &state, &agent, &SensorSpec::new("n", SensorKind::Normal).with_resolution(1, 1), 0);
        assert_eq!(n.bytes().unwrap(), &[normal_byte(0.0), normal_byte(0.0), normal_byte(-1.0)]);
        let s = render(&w, &state, &agent, &SensorSpec::new("s", SensorKind::Semantic).with_resolution(1, 1), 0);
        assert_eq!(s.bytes().unwrap(), &[Category::Wall.index()]);
        let c = render(&w, &state, &agent, &SensorSpec::new("c", SensorKind::Color).with_resolution(1, 1), 0);
        assert_eq!(c.bytes().unwrap(), &[200]);
    }

    #[test]
    fn camera_basis_is_right_handed() {
        let state = AgentState::at_rest(Vec2::ZERO, 0.0);
        let cam = Camera::new(&state, &AgentConfig::default(), &SensorSpec::new("c", SensorKind::Color));
        assert_eq!(cam.forward, [0.0, 0.0, 1.0]);
        assert_eq!(cam.up, [0.0, 1.0, 0.0]);
        // leftmost pixel looks toward +x (agent left)
        assert!(cam.ray(0, 42)[0] > 0.0);
    }

    #[test]
    fn encodings() {
        assert_eq!(normal_byte(1.0), 255);
        assert_eq!(normal_byte(-1.0), 0);
        assert_eq!(instance_byte(0), 0);
        assert_eq!(instance_byte(1), 1);
        assert_eq!(instance_byte(255), 255);
        assert_eq!(instance_byte(256), 1);
        assert_eq!(depth_byte(10.0, 10.0), 255);
        assert_eq!(depth_byte(-1.0, 10.0), 0);
    }

    #[test]
    fn validation() {
        assert!(SensorSpec::new("a", SensorKind::Color).with_resolution(0, 4).validate().is_err());
        let mut s = SensorSpec::new("a", SensorKind::Depth);
        s.depth_range = [5.0, 1.0];
        assert!(s.validate().is_err());
        let d = default_sensors();
        assert!(validate_sensors(&d).is_ok());
        let dup = vec![d[0].clone(), d[0].clone()];
        assert_eq!(validate_sensors(&dup), Err(SensorError::DuplicateName("color".into())));
        assert_eq!(validate_sensors(&[]), Err(SensorError::Empty));
    }
}
