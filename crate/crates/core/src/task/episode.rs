use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::nav::{resolve_goal, sample_start_goal, ResolvedGoal, SampleOptions};
use crate::physics::{self, contact_reading, AgentState, ContactReading, ControlCommand};
use crate::sensors::{measurements, Kinematics, Measurements};
use crate::sim::World;

use super::{GoalSpec, TaskError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpisodeConfig {
    pub house_id: Option<String>,
    pub seed: u64,
    pub goal: GoalSpec,
    /// Timeout T in steps.
    pub max_steps: u32,
    pub trials_per_scene: u32,
    /// Success threshold for object and room goals (m).
    pub success_distance: f64,
    /// Minimum start-to-goal shortest-path distance (m).
    pub min_geodesic: f64,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            house_id: None,
            seed: 0,
            goal: GoalSpec::default(),
            max_steps: 500,
            trials_per_scene: 10,
            success_distance: 0.5,
            min_geodesic: 0.0,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<(), TaskError> {
        if self.max_steps == 0 {
            return Err(TaskError::Config("max_steps must be at least 1".into()));
        }
        if !(self.success_distance.is_finite() && self.success_distance > 0.0) {
            return Err(TaskError::Config("success_distance must be positive".into()));
        }
        if !(self.min_geodesic.is_finite() && self.min_geodesic >= 0.0) {
            return Err(TaskError::Config("min_geodesic must be non-negative".into()));
        }
        self.goal.validate().map_err(TaskError::Config)
    }

    pub fn sample_options(&self) -> SampleOptions {
        SampleOptions {
            success_distance: self.success_distance,
            min_geodesic: self.min_geodesic,
            ..SampleOptions::default()
        }
    }
}

/// Per-step outcome of the task layer, before sensors run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    /// Distance term of the reward: d_{t-1} - d_t.
    pub progress: f64,
    pub done: bool,
    pub success: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub success: bool,
    pub steps: u32,
    /// Fraction of the time budget left on success, else 0.
    pub speed: f64,
}

impl EpisodeResult {
    pub fn new(success: bool, steps: u32, max_steps: u32) -> Self {
        let speed = if success {
            1.0 - f64::from(steps) / f64::from(max_steps)
        } else {
            0.0
        };
        EpisodeResult { success, steps, speed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub episodes: usize,
    /// Percent.
    pub success_rate: f64,
    /// Percent.
    pub mean_speed: f64,
}

pub fn aggregate(results: &[EpisodeResult]) -> Result<Metrics, TaskError> {
    if results.is_empty() {
        return Err(TaskError::NoEpisodes);
    }
    let n = results.len() as f64;
    let successes = results.iter().filter(|r| r.success).count() as f64;
    let speed: f64 = results.iter().map(|r| r.speed).sum();
    Ok(Metrics {
        episodes: results.len(),
        success_rate: 100.0 * successes / n,
        mean_speed: 100.0 * speed / n,
    })
}

/// Exported episode line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub scene: String,
    pub seed: u64,
    pub goal: GoalSpec,
    pub success: bool,
    pub steps: u32,
    pub speed: f64,
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[EpisodeRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl(text: &str) -> Result<Vec<EpisodeRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

/// One navigation episode on a world.
#[derive(Debug, Clone)]
pub struct Episode {
    config: EpisodeConfig,
    seed: u64,
    state: AgentState,
    goal: ResolvedGoal,
    t: u32,
    d0: f64,
    d_prev: f64,
    done: bool,
    success: bool,
    kinematics: Kinematics,
    contact: ContactReading,
}

impl Episode {
    pub fn reset(world: &World, config: &EpisodeConfig, seed: u64) -> Result<Episode, TaskError> {
        config.validate()?;
        let sg = sample_start_goal(&world.house, &world.grid, &config.goal, seed, &config.sample_options())?;
        Ok(Episode::new(world, config, seed, sg.start, sg.goal))
    }

    /// Start from a given pose toward a goal that does not depend on it.
    pub fn start_at(world: &World, config: &EpisodeConfig, seed: u64, start: AgentState) -> Result<Episode, TaskError> {
        config.validate()?;
        let goal = resolve_goal(&world.house, &world.grid, &config.goal, &config.sample_options())?;
        Ok(Episode::new(world, config, seed, start, goal))
    }

    fn new(world: &World, config: &EpisodeConfig, seed: u64, start: AgentState, goal: ResolvedGoal) -> Episode {
        let d0 = goal.region.distance(start.position);
        let contact = contact_reading(&start, &world.agent, &world.collision);
        Episode {
            config: config.clone(),
            seed,
            state: start,
            goal,
            t: 0,
            d0,
            d_prev: d0,
            done: false,
            success: false,
            kinematics: Kinematics::default(),
            contact,
        }
    }

    pub fn step(&mut self, world: &World, cmd: ControlCommand) -> Result<StepOutcome, TaskError> {
        if self.done {
            return Err(TaskError::EpisodeDone);
        }
        let before = self.state;
        let (after, contact) = physics::step(&before, cmd, &world.agent, &world.collision);
        let dt = world.agent.dt;
        let forward_speed = (after.position - before.position).dot(after.heading()) / dt;
        self.kinematics = Kinematics {
            forward_speed,
            angular_speed: (after.yaw - before.yaw) / dt,
            forward_accel: (forward_speed - self.kinematics.forward_speed) / dt,
        };
        self.state = after;
        self.contact = contact;
        self.t += 1;

        let d = self.goal.region.distance(after.position);
        let progress = self.d_prev - d;
        self.d_prev = d;
        let reward = progress - 1.0 / f64::from(self.config.max_steps);
        self.success = d <= self.goal.threshold;
        self.done = self.success || self.t >= self.config.max_steps;
        Ok(StepOutcome {
            reward,
            progress,
            done: self.done,
            success: self.success,
        })
    }

    pub fn measurements(&self) -> Measurements {
        measurements(&self.state, &self.goal, self.kinematics, self.t, self.config.max_steps)
    }

    pub fn result(&self) -> EpisodeResult {
        EpisodeResult::new(self.success, self.t, self.config.max_steps)
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn state(&self) -> &AgentState {
        &self.state
    }

    pub fn goal(&self) -> &ResolvedGoal {
        &self.goal
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn done(&self) -> bool {
        self.done
    }

    pub fn success(&self) -> bool {
        self.success
    }

    pub fn contact(&self) -> ContactReading {
        self.contact
    }

    pub fn kinematics(&self) -> Kinematics {
        self.kinematics
    }

    /// Euclidean distance to the goal region at reset.
    pub fn initial_distance(&self) -> f64 {
        self.d0
    }

    pub fn distance(&self) -> f64 {
        self.d_prev
    }
}
