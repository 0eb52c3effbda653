use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use crate::physics::{CommandKind, ControlCommand};
use crate::scene::{apply_variation, generate_house, load_house, GenParams, House};
use crate::sim::{Simulator, World};
use crate::task::TaskError;

use super::protocol::{
    encode_observation, ClientMessage, ErrorCode, SceneSource, SensorLayout, ServerMessage, SessionConfig,
    PROTOCOL_VERSION,
};

/// Upper bound on `repeat` for one step message.
pub const MAX_REPEAT: u32 = 10_000;

#[derive(Debug, Clone, Default)]
pub struct SessionOptions {
    /// Root for `file` scene sources; file scenes are refused without one.
    pub scene_dir: Option<PathBuf>,
    /// Base seed for resets without an explicit seed, overriding the
    /// configured episode seed.
    pub default_seed: Option<u64>,
}

impl SessionOptions {
    /// Reads the `NAVSIM_SEED` override from the environment.
    pub fn from_env(scene_dir: Option<PathBuf>) -> Result<Self, String> {
        let default_seed = match std::env::var("NAVSIM_SEED") {
            Ok(v) => Some(v.trim().parse().map_err(|_| format!("NAVSIM_SEED={v:?} is not an unsigned integer"))?),
            Err(_) => None,
        };
        Ok(SessionOptions {
            scene_dir,
            default_seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionState {
    /// Waiting for hello.
    Start,
    /// Handshake done, waiting for configure.
    Greeted,
    /// Configured, no episode running.
    Configured,
    Active,
    /// Episode finished; reset or close.
    Done,
    Closed,
}

/// One client's simulator behind the protocol state machine.
pub struct Session {
    id: String,
    opts: SessionOptions,
    state: SessionState,
    sim: Option<Simulator>,
    resets: u64,
}

fn resolve_scene_path(dir: Option<&Path>, rel: &str) -> Result<PathBuf, String> {
    let dir = dir.ok_or("file scenes are disabled: the server has no scene directory")?;
    let p = Path::new(rel);
    if p.is_absolute() || p.components().any(|c| !matches!(c, Component::Normal(_) | Component::CurDir)) {
        return Err(format!("scene path {rel:?} must be relative and stay inside the scene directory"));
    }
    Ok(dir.join(p))
}

impl Session {
    pub fn new(id: impl Into<String>, opts: SessionOptions) -> Self {
        Session {
            id: id.into(),
            opts,
            state: SessionState::Start,
            sim: None,
            resets: 0,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn simulator(&self) -> Option<&Simulator> {
        self.sim.as_ref()
    }

    pub fn is_closed(&self) -> bool {
        self.state == SessionState::Closed
    }

    /// Parse and handle one text frame, returning the reply frame.
    pub fn handle_text(&mut self, text: &str) -> String {
        self.handle_json(text).to_json()
    }

    fn handle_json(&mut self, text: &str) -> ServerMessage {
        let value: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => return ServerMessage::error(ErrorCode::BadMessage, format!("malformed JSON: {e}")),
        };
        let is_configure = value.get("type").and_then(|t| t.as_str()) == Some("configure");
        match serde_json::from_value::<ClientMessage>(value) {
            Ok(msg) => self.handle(msg),
            Err(e) if is_configure => ServerMessage::error(ErrorCode::ConfigError, format!("invalid configure: {e}")),
            Err(e) => ServerMessage::error(ErrorCode::BadMessage, format!("invalid message: {e}")),
        }
    }

    fn bad_state(&self, what: &str) -> ServerMessage {
        ServerMessage::error(
            ErrorCode::BadState,
            format!("{what} is not allowed in state {:?}", self.state),
        )
    }

    fn ready(&self, sensors: Option<Vec<SensorLayout>>) -> ServerMessage {
        ServerMessage::Ready {
            session: self.id.clone(),
            version: PROTOCOL_VERSION.to_string(),
            sensors,
        }
    }

    pub fn handle(&mut self, msg: ClientMessage) -> ServerMessage {
        use SessionState::*;
        if self.state == Closed {
            return self.bad_state("any message");
        }
        match msg {
            ClientMessage::Hello { version } => {
                if self.state != Start {
                    return self.bad_state("hello");
                }
                if version != PROTOCOL_VERSION {
                    return ServerMessage::error(
                        ErrorCode::VersionMismatch,
                        format!("client speaks version {version:?}, server speaks {PROTOCOL_VERSION:?}"),
                    );
                }
                self.state = Greeted;
                self.ready(None)
            }
            ClientMessage::Configure { config } => {
                if self.state == Start {
                    return self.bad_state("configure");
                }
                match self.build(&config) {
                    Ok(sim) => {
                        let layout = sim.sensors().iter().map(SensorLayout::of).collect();
                        self.sim = Some(sim);
                        self.resets = 0;
                        self.state = Configured;
                        self.ready(Some(layout))
                    }
                    Err(e) => ServerMessage::error(ErrorCode::ConfigError, e),
                }
            }
            ClientMessage::Reset { seed } => {
                if !matches!(self.state, Configured | Active | Done) {
                    return self.bad_state("reset");
                }
                let sim = self.sim.as_mut().expect("configured");
                let seed = seed.unwrap_or_else(|| {
                    self.opts
                        .default_seed
                        .unwrap_or(sim.config().seed)
                        .wrapping_add(self.resets)
                });
                match sim.reset(seed) {
                    Ok(obs) => {
                        self.resets += 1;
                        self.state = Active;
                        let goal = sim.config().goal.one_hot().to_vec();
                        ServerMessage::Observation {
                            step: 0,
                            observation: encode_observation(&obs),
                            reward: 0.0,
                            done: false,
                            success: false,
                            goal,
                        }
                    }
                    Err(e) => ServerMessage::error(ErrorCode::ConfigError, format!("reset failed: {e}")),
                }
            }
            ClientMessage::Step { action, repeat, scale } => {
                if self.state != Active {
                    return self.bad_state("step");
                }
                let kind: CommandKind = match action.parse() {
                    Ok(k) => k,
                    Err(e) => return ServerMessage::error(ErrorCode::BadAction, format!("{e}")),
                };
                let repeat = repeat.unwrap_or(1);
                if repeat == 0 || repeat > MAX_REPEAT {
                    return ServerMessage::error(ErrorCode::BadAction, format!("repeat must lie in 1..={MAX_REPEAT}"));
                }
                let scale = scale.unwrap_or(1.0);
                if !(scale.is_finite() && scale >= 0.0) {
                    return ServerMessage::error(ErrorCode::BadAction, "scale must be a non-negative number");
                }
                let sim = self.sim.as_mut().expect("configured");
                let cmd = ControlCommand::scaled(kind, scale);
                let mut reward = 0.0;
                let mut last = None;
                for _ in 0..repeat {
                    match sim.step(cmd) {
                        Ok(r) => {
                            reward += r.reward;
                            let done = r.done;
                            last = Some(r);
                            if done {
                                break;
                            }
                        }
                        Err(e) => return ServerMessage::error(ErrorCode::BadState, e.to_string()),
                    }
                }
                let r = last.expect("at least one step ran");
                if r.done {
                    self.state = Done;
                }
                let ep = sim.episode().expect("episode running");
                ServerMessage::Observation {
                    step: ep.t(),
                    observation: encode_observation(&r.observation),
                    reward,
                    done: r.done,
                    success: r.success,
                    goal: sim.config().goal.one_hot().to_vec(),
                }
            }
            ClientMessage::Close => {
                self.state = Closed;
                self.sim = None;
                self.ready(None)
            }
        }
    }

    fn build(&self, config: &SessionConfig) -> Result<Simulator, String> {
        let house: House = match &config.scene {
            SceneSource::File(rel) => {
                let path = resolve_scene_path(self.opts.scene_dir.as_deref(), rel)?;
                load_house(&path).map_err(|e| format!("{}: {e}", path.display()))?
            }
            SceneSource::Generate {
                seed,
                rooms,
                furnished,
            } => {
                if *rooms == 0 || *rooms > 32 {
                    return Err(format!("rooms must lie in 1..=32, got {rooms}"));
                }
                generate_house(*seed, *rooms, *furnished, &GenParams::default()).map_err(|e| e.to_string())?
            }
        };
        let house = apply_variation(&house, &config.variation).map_err(|e| e.to_string())?;
        let world = World::new(house, config.agent.clone()).map_err(|e: TaskError| e.to_string())?;
        Simulator::new(Arc::new(world), config.sensors.clone(), config.episode.clone()).map_err(|e| e.to_string())
    }
}
