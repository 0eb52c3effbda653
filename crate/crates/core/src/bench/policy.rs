use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::physics::{CommandKind, ContactReading};
use crate::seed;
use crate::sensors::Measurements;

/// Heading error (rad) above which the greedy policy turns instead of stepping.
pub const GREEDY_TURN_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Random,
    Greedy,
    ForwardBump,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [PolicyKind::Random, PolicyKind::Greedy, PolicyKind::ForwardBump];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Random => "random",
            PolicyKind::Greedy => "greedy",
            PolicyKind::ForwardBump => "forward_bump",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown policy {s:?} (expected random, greedy or forward_bump)"))
    }
}

/// Scripted agent acting on measurements and contact flags only.
pub trait Policy {
    fn act(&mut self, m: &Measurements, contact: &ContactReading) -> CommandKind;
}

const MOVES: [CommandKind; 3] = [CommandKind::StepForward, CommandKind::TurnLeft, CommandKind::TurnRight];

/// Uniform over step_forward, turn_left and turn_right.
pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl Policy for RandomPolicy {
    fn act(&mut self, _: &Measurements, _: &ContactReading) -> CommandKind {
        MOVES[self.rng.random_range(0..MOVES.len())]
    }
}

/// Turns toward the goal direction, else steps forward.
pub struct GreedyPolicy;

impl Policy for GreedyPolicy {
    fn act(&mut self, m: &Measurements, contact: &ContactReading) -> CommandKind {
        let [x, z] = m.direction;
        let error = x.atan2(z);
        let toward = if error >= 0.0 {
            CommandKind::TurnLeft
        } else {
            CommandKind::TurnRight
        };
        if contact.front() || error.abs() > GREEDY_TURN_THRESHOLD {
            toward
        } else {
            CommandKind::StepForward
        }
    }
}

/// Forward until the front sensor fires, then a random number of turns in a
/// random direction.
pub struct ForwardBumpPolicy {
    rng: ChaCha8Rng,
    turning: Option<(CommandKind, u32)>,
}

impl Policy for ForwardBumpPolicy {
    fn act(&mut self, _: &Measurements, contact: &ContactReading) -> CommandKind {
        if self.turning.is_none() && contact.front() {
            let dir = if self.rng.random_bool(0.5) {
                CommandKind::TurnLeft
            } else {
                CommandKind::TurnRight
            };
            self.turning = Some((dir, self.rng.random_range(1..=8)));
        }
        match self.turning {
            Some((dir, left)) => {
                self.turning = (left > 1).then_some((dir, left - 1));
                dir
            }
            None => CommandKind::StepForward,
        }
    }
}

pub fn make_policy(kind: PolicyKind, policy_seed: u64) -> Box<dyn Policy + Send> {
    let rng = seed::rng_for(policy_seed, &[0x9011c7]);
    match kind {
        PolicyKind::Random => Box::new(RandomPolicy { rng }),
        PolicyKind::Greedy => Box::new(GreedyPolicy),
        PolicyKind::ForwardBump => Box::new(ForwardBumpPolicy { rng, turning: None }),
    }
}
