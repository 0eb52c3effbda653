//! Episodes: goals, reset and step semantics, reward, and metrics.
//!
//! The reward at step t is `(d_{t-1} - d_t) - 1/T`, where `d` is the Euclidean
//! distance from the agent to the closest point of the goal region and `T` the
//! step budget.

mod episode;
mod goal;

pub use episode::{
    aggregate, read_jsonl, write_jsonl, Episode, EpisodeConfig, EpisodeRecord, EpisodeResult, Metrics, StepOutcome,
};
pub use goal::{GoalSpec, ObjectSelect, GOAL_ONE_HOT_LEN};

use crate::nav::NavError;
use crate::physics::PhysicsError;
use crate::sensors::{Observation, SensorError};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TaskError {
    #[error(transparent)]
    Nav(#[from] NavError),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error(transparent)]
    Sensor(#[from] SensorError),
    #[error("invalid episode config: {0}")]
    Config(String),
    #[error("episode is over; reset first")]
    EpisodeDone,
    #[error("no episode has been reset")]
    NotReset,
    #[error("cannot aggregate zero episodes")]
    NoEpisodes,
}

/// What a client sees after each step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub success: bool,
}
