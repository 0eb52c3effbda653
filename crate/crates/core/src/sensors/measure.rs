use crate::nav::ResolvedGoal;
use crate::physics::AgentState;

/// Realized motion over the last step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Kinematics {
    /// Signed speed along the heading (m/s).
    pub forward_speed: f64,
    pub angular_speed: f64,
    /// Change of forward speed per second (m/s²).
    pub forward_accel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Measurements {
    /// Forward speed (m/s) and angular speed (rad/s).
    pub velocity: [f64; 2],
    pub acceleration: f64,
    pub dist_euclid: f64,
    /// Infinite when the agent cannot reach the goal.
    pub dist_shortest_path: f64,
    /// Unit vector toward the closest goal point in the agent frame
    /// (x left, z forward); zero at the goal.
    pub direction: [f64; 2],
    pub time_norm: f64,
}

impl Measurements {
    /// Flat layout `[dist_euclid, dist_shortest_path, dir_x, dir_z, time_norm,
    /// forward_speed]`, with an unreachable distance as -1.
    pub fn as_vector(&self) -> [f64; 6] {
        [
            self.dist_euclid,
            finite_or_minus_one(self.dist_shortest_path),
            self.direction[0],
            self.direction[1],
            self.time_norm,
            self.velocity[0],
        ]
    }
}

pub fn finite_or_minus_one(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        -1.0
    }
}

pub fn measurements(state: &AgentState, goal: &ResolvedGoal, kin: Kinematics, t: u32, max_steps: u32) -> Measurements {
    let (closest, dist) = goal.region.closest(state.position);
    let direction = match (closest - state.position).normalized() {
        Some(d) if dist > 0.0 => [d.dot(state.left()), d.dot(state.heading())],
        _ => [0.0, 0.0],
    };
    Measurements {
        velocity: [kin.forward_speed, kin.angular_speed],
        acceleration: kin.forward_accel,
        dist_euclid: dist,
        dist_shortest_path: goal.field.sample(state.position),
        direction,
        time_norm: (f64::from(t) / f64::from(max_steps.max(1))).clamp(0.0, 1.0),
    }
}
