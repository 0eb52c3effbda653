//! Cylinder-proxy agent dynamics.
//!
//! Two presets share the same collision response. The discrete preset applies
//! calibrated displacements per command (0.2 m steps, 0.4 rad turns) and zeroes
//! velocities afterwards; the continuous preset injects acceleration and
//! integrates semi-implicitly with speed clamps and coasting friction.

mod world;

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geom::Vec2;

pub use world::{CollisionWorld, Obstacle, ObstacleKind, SweepHit};

/// Separation kept from a surface after a swept contact.
const SKIN: f64 = 1e-8;
/// Disc-to-surface gap under which the contact sensors report a touch.
pub const CONTACT_TOLERANCE: f64 = 1e-4;
/// Slide iterations per step: the first move plus re-resolution passes.
const MAX_SLIDE_ITERATIONS: usize = 3;
pub const MAX_PITCH: f64 = FRAC_PI_3;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PhysicsError {
    #[error("invalid agent config: {0}")]
    InvalidConfig(String),
    #[error("unknown action {0:?}")]
    UnknownAction(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentConfig {
    pub radius: f64,
    pub height: f64,
    pub eye_height: f64,
    pub mass: f64,
    pub linear_accel: f64,
    pub angular_accel: f64,
    pub max_linear_speed: f64,
    pub max_angular_speed: f64,
    /// Coasting decay rate (1/s) for the continuous preset.
    pub friction: f64,
    pub preset: Preset,
    pub dt: f64,
    /// Discrete preset displacement per translation command (m).
    pub step_length: f64,
    /// Discrete preset rotation per turn command (rad).
    pub turn_angle: f64,
    /// Pitch change per look command (rad), both presets.
    pub pitch_step: f64,
    /// Height of the four contact sensors above the floor (m).
    pub contact_height: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            radius: 0.10,
            height: 1.09,
            eye_height: 1.09,
            mass: 1.0,
            linear_accel: 20.0,
            angular_accel: 4.0 * PI,
            max_linear_speed: 2.0,
            max_angular_speed: 4.0 * PI,
            friction: 4.0,
            preset: Preset::Discrete,
            dt: 0.1,
            step_length: 0.2,
            turn_angle: 0.4,
            pitch_step: 0.2,
            contact_height: 0.3,
        }
    }
}

impl AgentConfig {
    pub fn continuous() -> Self {
        AgentConfig {
            preset: Preset::Continuous,
            ..AgentConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), PhysicsError> {
        let positive = [
            ("radius", self.radius),
            ("height", self.height),
            ("eye_height", self.eye_height),
            ("mass", self.mass),
            ("linear_accel", self.linear_accel),
            ("angular_accel", self.angular_accel),
            ("max_linear_speed", self.max_linear_speed),
            ("max_angular_speed", self.max_angular_speed),
            ("friction", self.friction),
            ("dt", self.dt),
            ("step_length", self.step_length),
            ("turn_angle", self.turn_angle),
            ("pitch_step", self.pitch_step),
            ("contact_height", self.contact_height),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(PhysicsError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub position: Vec2,
    pub yaw: f64,
    pub pitch: f64,
    pub linear_velocity: Vec2,
    pub angular_velocity: f64,
}

impl AgentState {
    pub fn at_rest(position: Vec2, yaw: f64) -> Self {
        AgentState {
            position,
            yaw,
            pitch: 0.0,
            linear_velocity: Vec2::ZERO,
            angular_velocity: 0.0,
        }
    }

    pub fn heading(&self) -> Vec2 {
        Vec2::from_yaw(self.yaw)
    }

    pub fn left(&self) -> Vec2 {
        Vec2::left_of_yaw(self.yaw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    StepForward,
    StepBack,
    TurnLeft,
    TurnRight,
    StrafeLeft,
    StrafeRight,
    LookUp,
    LookDown,
    Idle,
}

impl CommandKind {
    pub const ALL: [CommandKind; 9] = [
        CommandKind::StepForward,
        CommandKind::StepBack,
        CommandKind::TurnLeft,
        CommandKind::TurnRight,
        CommandKind::StrafeLeft,
        CommandKind::StrafeRight,
        CommandKind::LookUp,
        CommandKind::LookDown,
        CommandKind::Idle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::StepForward => "step_forward",
            CommandKind::StepBack => "step_back",
            CommandKind::TurnLeft => "turn_left",
            CommandKind::TurnRight => "turn_right",
            CommandKind::StrafeLeft => "strafe_left",
            CommandKind::StrafeRight => "strafe_right",
            CommandKind::LookUp => "look_up",
            CommandKind::LookDown => "look_down",
            CommandKind::Idle => "idle",
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CommandKind {
    type Err = PhysicsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CommandKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| PhysicsError::UnknownAction(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlCommand {
    pub kind: CommandKind,
    pub scale: f64,
}

impl ControlCommand {
    pub fn new(kind: CommandKind) -> Self {
        ControlCommand { kind, scale: 1.0 }
    }

    pub fn scaled(kind: CommandKind, scale: f64) -> Self {
        ControlCommand {
            kind,
            scale: if scale.is_finite() { scale.max(0.0) } else { 0.0 },
        }
    }
}

impl From<CommandKind> for ControlCommand {
    fn from(kind: CommandKind) -> Self {
        ControlCommand::new(kind)
    }
}

/// Contact sensors in agent frame order: front, right, back, left.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContactReading {
    pub flags: [bool; 4],
    /// Impulse magnitudes (N·s) absorbed by each sensor during the last step.
    /// Only `step` fills these; a static reading reports zeros.
    pub impulse: [f64; 4],
}

impl ContactReading {
    pub fn any(&self) -> bool {
        self.flags.iter().any(|&f| f)
    }

    pub fn front(&self) -> bool {
        self.flags[0]
    }
}

fn sensor_directions(yaw: f64) -> [Vec2; 4] {
    let fwd = Vec2::from_yaw(yaw);
    let left = Vec2::left_of_yaw(yaw);
    [fwd, -left, -fwd, left]
}

fn sensor_hits(dir_to_contact: Vec2, yaw: f64) -> [bool; 4] {
    let cos_limit = FRAC_PI_4.cos() - 1e-9;
    sensor_directions(yaw).map(|s| s.dot(dir_to_contact) >= cos_limit)
}

/// Which contact sensors touch geometry spanning the sensor height.
pub fn contact_reading(state: &AgentState, cfg: &AgentConfig, world: &CollisionWorld) -> ContactReading {
    let mut flags = [false; 4];
    for o in &world.obstacles {
        if !o.spans_height(cfg.contact_height) {
            continue;
        }
        let (d, normal) = o.signed_distance(state.position);
        if d > cfg.radius + CONTACT_TOLERANCE {
            continue;
        }
        for (f, hit) in flags.iter_mut().zip(sensor_hits(-normal, state.yaw)) {
            *f |= hit;
        }
    }
    ContactReading {
        flags,
        impulse: [0.0; 4],
    }
}

/// Result of one swept translation with sliding.
#[derive(Debug, Clone, Default)]
pub struct SlideResult {
    pub position: Vec2,
    /// Contact normals met on the way, in order.
    pub normals: Vec<Vec2>,
}

/// Move a disc by `displacement`, stopping at contacts and sliding along them.
pub fn move_and_slide(world: &CollisionWorld, start: Vec2, displacement: Vec2, radius: f64) -> SlideResult {
    let mut pos = start;
    let mut remaining = displacement;
    let mut normals = Vec::new();
    for _ in 0..MAX_SLIDE_ITERATIONS {
        if remaining.length_sq() < 1e-24 {
            break;
        }
        let (target, hit) = match world.sweep(pos, remaining, radius) {
            None => (pos + remaining, None),
            Some(h) => {
                let approach = -remaining.dot(h.normal);
                let t = (h.t - SKIN / approach).max(0.0);
                (pos + remaining * t, Some((h, t)))
            }
        };
        if world.clearance(target) < radius - 1e-9 {
            // numerical safety net; never accept a penetrating position
            break;
        }
        pos = target;
        let Some((h, t)) = hit else {
            break;
        };
        normals.push(h.normal);
        let rest = remaining * (1.0 - t);
        let into = rest.dot(h.normal);
        remaining = if into < 0.0 { rest - h.normal * into } else { rest };
    }
    SlideResult { position: pos, normals }
}

fn impulses(normals: &[Vec2], blocked: Vec2, yaw: f64, mass: f64, dt: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for &n in normals {
        let speed = (-blocked.dot(n)).max(0.0) / dt;
        for (o, hit) in out.iter_mut().zip(sensor_hits(-n, yaw)) {
            if hit {
                *o += mass * speed;
            }
        }
    }
    out
}

/// Advance the agent by one command.
pub fn step(
    state: &AgentState,
    cmd: ControlCommand,
    cfg: &AgentConfig,
    world: &CollisionWorld,
) -> (AgentState, ContactReading) {
    let mut next = *state;
    let s = cmd.scale;
    let translation = match cfg.preset {
        Preset::Discrete => {
            let fwd = state.heading();
            let left = state.left();
            let d = cfg.step_length * s;
            let t = match cmd.kind {
                CommandKind::StepForward => fwd * d,
                CommandKind::StepBack => fwd * -d,
                CommandKind::StrafeLeft => left * d,
                CommandKind::StrafeRight => left * -d,
                _ => Vec2::ZERO,
            };
            match cmd.kind {
                CommandKind::TurnLeft => next.yaw += cfg.turn_angle * s,
                CommandKind::TurnRight => next.yaw -= cfg.turn_angle * s,
                _ => {}
            }
            next.linear_velocity = Vec2::ZERO;
            next.angular_velocity = 0.0;
            t
        }
        Preset::Continuous => {
            let fwd = state.heading();
            let left = state.left();
            let mut v_fwd = state.linear_velocity.dot(fwd);
            let mut v_left = state.linear_velocity.dot(left);
            let mut w = state.angular_velocity;
            let dv = cfg.linear_accel * s * cfg.dt;
            let dw = cfg.angular_accel * s * cfg.dt;
            let (mut push_fwd, mut push_left, mut push_turn) = (false, false, false);
            match cmd.kind {
                CommandKind::StepForward => (v_fwd, push_fwd) = (v_fwd + dv, true),
                CommandKind::StepBack => (v_fwd, push_fwd) = (v_fwd - dv, true),
                CommandKind::StrafeLeft => (v_left, push_left) = (v_left + dv, true),
                CommandKind::StrafeRight => (v_left, push_left) = (v_left - dv, true),
                CommandKind::TurnLeft => (w, push_turn) = (w + dw, true),
                CommandKind::TurnRight => (w, push_turn) = (w - dw, true),
                _ => {}
            }
            let speed = v_fwd.hypot(v_left);
            if speed > cfg.max_linear_speed {
                let k = cfg.max_linear_speed / speed;
                v_fwd *= k;
                v_left *= k;
            }
            w = w.clamp(-cfg.max_angular_speed, cfg.max_angular_speed);
            let decay = (1.0 - cfg.friction * cfg.dt).max(0.0);
            if !push_fwd {
                v_fwd *= decay;
            }
            if !push_left {
                v_left *= decay;
            }
            if !push_turn {
                w *= decay;
            }
            next.linear_velocity = fwd * v_fwd + left * v_left;
            next.angular_velocity = w;
            next.yaw += w * cfg.dt;
            next.linear_velocity * cfg.dt
        }
    };
    match cmd.kind {
        CommandKind::LookUp => next.pitch = (next.pitch + cfg.pitch_step * s).clamp(-MAX_PITCH, MAX_PITCH),
        CommandKind::LookDown => next.pitch = (next.pitch - cfg.pitch_step * s).clamp(-MAX_PITCH, MAX_PITCH),
        _ => {}
    }

    let slide = move_and_slide(world, state.position, translation, cfg.radius);
    next.position = slide.position;
    if cfg.preset == Preset::Continuous {
        let mut v = next.linear_velocity;
        for &n in &slide.normals {
            let into = v.dot(n);
            if into < 0.0 {
                v = v - n * into;
            }
        }
        next.linear_velocity = v;
    }
    let blocked = translation - (slide.position - state.position);
    let mut reading = contact_reading(&next, cfg, world);
    reading.impulse = impulses(&slide.normals, blocked, next.yaw, cfg.mass, cfg.dt);
    (next, reading)
}
