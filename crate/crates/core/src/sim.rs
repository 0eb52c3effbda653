//! A house with its derived collision, navigation and render structures, and
//! a simulator that runs episodes on it with a sensor configuration.

use std::sync::Arc;

use crate::nav::{build_grid, OccupancyGrid, DEFAULT_RESOLUTION};
use crate::physics::{AgentConfig, CollisionWorld, ControlCommand};
use crate::scene::House;
use crate::seed;
use crate::sensors::{observe, validate_sensors, Observation, RenderWorld, SensorInputs, SensorSpec};
use crate::task::{Episode, EpisodeConfig, StepResult, TaskError};

/// Immutable per-house data shared by episodes and sessions.
#[derive(Debug, Clone)]
pub struct World {
    pub house: House,
    pub agent: AgentConfig,
    pub collision: CollisionWorld,
    pub grid: OccupancyGrid,
    pub render: RenderWorld,
}

impl World {
    pub fn new(house: House, agent: AgentConfig) -> Result<World, TaskError> {
        agent.validate()?;
        let collision = CollisionWorld::from_house(&house, agent.height);
        let grid = build_grid(&house, agent.radius, DEFAULT_RESOLUTION.min(agent.radius))?;
        let render = RenderWorld::from_house(&house);
        Ok(World {
            house,
            agent,
            collision,
            grid,
            render,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Simulator {
    world: Arc<World>,
    sensors: Vec<SensorSpec>,
    config: EpisodeConfig,
    episode: Option<Episode>,
}

impl Simulator {
    pub fn new(world: Arc<World>, sensors: Vec<SensorSpec>, config: EpisodeConfig) -> Result<Simulator, TaskError> {
        validate_sensors(&sensors)?;
        config.validate()?;
        Ok(Simulator {
            world,
            sensors,
            config,
            episode: None,
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn sensors(&self) -> &[SensorSpec] {
        &self.sensors
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    pub fn episode(&self) -> Option<&Episode> {
        self.episode.as_ref()
    }

    pub fn reset(&mut self, seed: u64) -> Result<Observation, TaskError> {
        self.episode = Some(Episode::reset(&self.world, &self.config, seed)?);
        self.observe()
    }

    pub fn step(&mut self, cmd: ControlCommand) -> Result<StepResult, TaskError> {
        let ep = self.episode.as_mut().ok_or(TaskError::NotReset)?;
        let out = ep.step(&self.world, cmd)?;
        Ok(StepResult {
            observation: self.observe()?,
            reward: out.reward,
            done: out.done,
            success: out.success,
        })
    }

    /// Current readings for every configured sensor.
    pub fn observe(&self) -> Result<Observation, TaskError> {
        let ep = self.episode.as_ref().ok_or(TaskError::NotReset)?;
        Ok(observe(
            &self.world.render,
            &self.sensors,
            SensorInputs {
                state: ep.state(),
                agent: &self.world.agent,
                contact: ep.contact(),
                measurements: ep.measurements(),
                noise_seed: seed::mix(ep.seed(), &[0x0b5, u64::from(ep.t())]),
            },
        ))
    }
}
