//! Benchmark harness: scripted policies over procedural scene suites, and a
//! simulator throughput probe.

mod policy;
mod suite;

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::nav::{sample_start_goal, RegionPart, SampleOptions};
use crate::physics::{AgentConfig, AgentState, CommandKind};
use crate::scene::{generate_house, GenParams, SceneError};
use crate::seed;
use crate::sensors::SensorSpec;
use crate::sim::{Simulator, World};
use crate::task::{aggregate, Episode, EpisodeConfig, EpisodeRecord, EpisodeResult, GoalSpec, Metrics, TaskError};

pub use policy::{make_policy, ForwardBumpPolicy, GreedyPolicy, Policy, PolicyKind, RandomPolicy, GREEDY_TURN_THRESHOLD};
pub use suite::{load_suite, EpisodeTemplate, Suite, SuiteFile, SuiteSpec, BUILTIN_SUITES};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("bench config: {0}")]
    Config(String),
    #[error("nothing to run: {0}")]
    Empty(String),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub policy: PolicyKind,
    /// Total episodes, spread round-robin over the suite's scenes.
    pub episodes: u32,
    /// Policy seed.
    pub seed: u64,
}

/// One scene of a suite: the world episodes run in, plus the furnished twin
/// that start/goal pairs are drawn from.
struct SceneSlot {
    world: Arc<World>,
    reference: Arc<World>,
}

fn build_scene(spec: &SuiteSpec, i: u32, agent: &AgentConfig) -> Result<SceneSlot, BenchError> {
    let seed = spec.seed + u64::from(i);
    let rooms = spec.rooms_for_scene(i) as usize;
    let params = GenParams::default();
    let reference = Arc::new(World::new(generate_house(seed, rooms, true, &params)?, agent.clone())?);
    let world = if spec.furnished {
        reference.clone()
    } else {
        Arc::new(World::new(generate_house(seed, rooms, false, &params)?, agent.clone())?)
    };
    Ok(SceneSlot { world, reference })
}

/// Start pose and goal point for one episode. Pairs are sampled on the
/// furnished twin so both clutter levels see identical starting
/// configurations.
fn draw_pair(slot: &SceneSlot, template: &EpisodeTemplate, episode_seed: u64) -> Result<(AgentState, GoalSpec), TaskError> {
    let goal = GoalSpec::PointGoal {
        point: None,
        success_radius: template.success_radius,
    };
    let opts = SampleOptions {
        success_distance: template.success_radius,
        min_geodesic: template.min_geodesic,
        ..SampleOptions::default()
    };
    let r = &slot.reference;
    let sg = sample_start_goal(&r.house, &r.grid, &goal, episode_seed, &opts)?;
    let RegionPart::Point(p) = sg.goal.region.parts[0] else {
        unreachable!("point goals resolve to a point region")
    };
    Ok((
        sg.start,
        GoalSpec::PointGoal {
            point: Some(p),
            success_radius: template.success_radius,
        },
    ))
}

/// Run one episode to completion with a scripted policy.
pub fn run_episode(world: &World, mut episode: Episode, policy: &mut dyn Policy) -> Result<EpisodeResult, TaskError> {
    while !episode.done() {
        let action = policy.act(&episode.measurements(), &episode.contact());
        episode.step(world, action.into())?;
    }
    Ok(episode.result())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub suite: String,
    pub clutter: String,
    pub rooms: String,
    pub policy: PolicyKind,
    pub episodes: usize,
    /// Percent.
    pub success: f64,
    /// Percent.
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Runtime {
    pub episodes: usize,
    pub steps: u64,
    pub seconds: f64,
    pub steps_per_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRun {
    pub row: ReportRow,
    pub records: Vec<EpisodeRecord>,
    /// Scenes or episodes that could not be set up.
    pub failures: Vec<String>,
    pub runtime: Runtime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<ReportRow>,
    pub runtime: Runtime,
    pub failures: Vec<String>,
}

impl BenchmarkReport {
    pub fn from_runs(runs: &[SuiteRun]) -> BenchmarkReport {
        let steps: u64 = runs.iter().map(|r| r.runtime.steps).sum();
        let seconds: f64 = runs.iter().map(|r| r.runtime.seconds).sum();
        BenchmarkReport {
            rows: runs.iter().map(|r| r.row.clone()).collect(),
            runtime: Runtime {
                episodes: runs.iter().map(|r| r.runtime.episodes).sum(),
                steps,
                seconds,
                steps_per_second: if seconds > 0.0 { steps as f64 / seconds } else { 0.0 },
            },
            failures: runs.iter().flat_map(|r| r.failures.iter().cloned()).collect(),
        }
    }

    /// Aligned text table.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<18} {:<10} {:>5} {:<13} {:>8} {:>9} {:>8}\n",
            "suite", "clutter", "rooms", "policy", "episodes", "success%", "speed%"
        );
        for r in &self.rows {
            out += &format!(
                "{:<18} {:<10} {:>5} {:<13} {:>8} {:>9.1} {:>8.1}\n",
                r.suite, r.clutter, r.rooms, r.policy, r.episodes, r.success, r.speed
            );
        }
        out += &format!(
            "{} episodes, {} steps in {:.2} s ({:.0} steps/s)\n",
            self.runtime.episodes, self.runtime.steps, self.runtime.seconds, self.runtime.steps_per_second
        );
        if !self.failures.is_empty() {
            out += &format!("{} failures; first: {}\n", self.failures.len(), self.failures[0]);
        }
        out
    }
}

/// Run `opts.episodes` episodes of a suite in parallel. Results depend only on
/// the suite and policy seeds.
pub fn run_suite(suite: &Suite, opts: &RunOptions) -> Result<SuiteRun, BenchError> {
    if opts.episodes == 0 {
        return Err(BenchError::Empty(format!("suite {} run with zero episodes", suite.name)));
    }
    if suite.spec.scenes == 0 {
        return Err(BenchError::Empty(format!("suite {} has no scenes", suite.name)));
    }
    let started = Instant::now();
    let agent = AgentConfig::default();
    let scenes: Vec<Result<SceneSlot, String>> = (0..suite.spec.scenes)
        .into_par_iter()
        .map(|i| build_scene(&suite.spec, i, &agent).map_err(|e| format!("scene {i}: {e}")))
        .collect();

    let outcomes: Vec<Result<(EpisodeRecord, u64), String>> = (0..opts.episodes)
        .into_par_iter()
        .map(|e| {
            let scene = e % suite.spec.scenes;
            let trial = e / suite.spec.scenes;
            let slot = scenes[scene as usize].as_ref().map_err(Clone::clone)?;
            let episode_seed = seed::mix(suite.spec.seed, &[u64::from(scene), u64::from(trial)]);
            let fail = |err: TaskError| format!("scene {scene} trial {trial}: {err}");
            let (start, goal) = draw_pair(slot, &suite.episode, episode_seed).map_err(fail)?;
            let config = EpisodeConfig {
                house_id: Some(slot.world.house.id.clone()),
                seed: episode_seed,
                goal: goal.clone(),
                max_steps: suite.episode.max_steps,
                success_distance: suite.episode.success_radius,
                min_geodesic: 0.0,
                ..EpisodeConfig::default()
            };
            let episode = Episode::start_at(&slot.world, &config, episode_seed, start).map_err(fail)?;
            let mut policy = make_policy(opts.policy, seed::mix(opts.seed, &[u64::from(scene), u64::from(trial)]));
            let result = run_episode(&slot.world, episode, policy.as_mut()).map_err(fail)?;
            Ok((
                EpisodeRecord {
                    scene: slot.world.house.id.clone(),
                    seed: episode_seed,
                    goal,
                    success: result.success,
                    steps: result.steps,
                    speed: result.speed,
                },
                u64::from(result.steps),
            ))
        })
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut steps = 0;
    for o in outcomes {
        match o {
            Ok((r, s)) => {
                steps += s;
                records.push(r);
            }
            Err(e) => failures.push(e),
        }
    }
    failures.sort();
    failures.dedup();
    let results: Vec<EpisodeResult> = records
        .iter()
        .map(|r| EpisodeResult {
            success: r.success,
            steps: r.steps,
            speed: r.speed,
        })
        .collect();
    let metrics: Metrics = aggregate(&results)
        .map_err(|_| BenchError::Empty(format!("suite {}: every episode failed to start: {failures:?}", suite.name)))?;
    let seconds = started.elapsed().as_secs_f64();
    Ok(SuiteRun {
        row: ReportRow {
            suite: suite.name.clone(),
            clutter: suite.spec.clutter_label().to_string(),
            rooms: suite.spec.size_label(),
            policy: opts.policy,
            episodes: metrics.episodes,
            success: metrics.success_rate,
            speed: metrics.mean_speed,
        },
        records,
        failures,
        runtime: Runtime {
            episodes: results.len(),
            steps,
            seconds,
            steps_per_second: steps as f64 / seconds.max(1e-9),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FpsResult {
    pub steps: u64,
    pub seconds: f64,
    pub steps_per_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorsFile {
    pub sensors: Vec<SensorSpec>,
}

impl SensorsFile {
    pub fn parse(text: &str) -> Result<SensorsFile, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }
}

/// Scene used by the throughput probe: a furnished three-room house.
pub fn fps_world(seed: u64) -> Result<Arc<World>, BenchError> {
    let house = generate_house(seed, 3, true, &GenParams::default())?;
    Ok(Arc::new(World::new(house, AgentConfig::default())?))
}

/// Wall-clock steps per second of an in-process random-policy loop with the
/// given sensors, on one thread. Episodes are reset as they end.
pub fn fps_bench(world: Arc<World>, sensors: Vec<SensorSpec>, n_steps: u64, seed: u64) -> Result<FpsResult, BenchError> {
    if n_steps == 0 {
        return Err(BenchError::Empty("fps run with zero steps".into()));
    }
    let mut sim = Simulator::new(world, sensors, EpisodeConfig::default())?;
    let mut policy = make_policy(PolicyKind::Random, seed);
    let mut resets = 0u64;
    sim.reset(seed::mix(seed, &[resets]))?;
    let started = Instant::now();
    for _ in 0..n_steps {
        let ep = sim.episode().expect("episode was reset");
        let action: CommandKind = policy.act(&ep.measurements(), &ep.contact());
        let r = sim.step(action.into())?;
        std::hint::black_box(&r.observation);
        if r.done {
            resets += 1;
            sim.reset(seed::mix(seed, &[resets]))?;
        }
    }
    let seconds = started.elapsed().as_secs_f64();
    Ok(FpsResult {
        steps: n_steps,
        seconds,
        steps_per_second: n_steps as f64 / seconds.max(1e-9),
    })
}
