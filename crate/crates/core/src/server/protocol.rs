//! Wire messages. Every frame is a JSON object with a `type` field.

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::physics::AgentConfig;
use crate::scene::VariationSpec;
use crate::sensors::{default_sensors, Encoding, Measurements, Observation, Reading, SensorKind, SensorSpec};
use crate::task::EpisodeConfig;

pub const PROTOCOL_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SceneSource {
    /// Scene file relative to the server's scene directory.
    File(String),
    Generate {
        seed: u64,
        #[serde(default = "one")]
        rooms: usize,
        #[serde(default)]
        furnished: bool,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub scene: SceneSource,
    #[serde(default)]
    pub variation: VariationSpec,
    #[serde(default)]
    pub agent: AgentConfig,
    #[serde(default = "default_sensors")]
    pub sensors: Vec<SensorSpec>,
    #[serde(default)]
    pub episode: EpisodeConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Hello {
        version: String,
    },
    Configure {
        config: Box<SessionConfig>,
    },
    Reset {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Step {
        action: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        repeat: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    Close,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadMessage,
    BadState,
    VersionMismatch,
    BadAction,
    ConfigError,
}

/// Shape of one configured sensor, sent with the configure acknowledgment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorLayout {
    pub name: String,
    pub kind: SensorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoding: Option<Encoding>,
}

impl SensorLayout {
    pub fn of(spec: &SensorSpec) -> Self {
        let cam = spec.kind.is_camera();
        SensorLayout {
            name: spec.name.clone(),
            kind: spec.kind,
            width: cam.then_some(spec.resolution[0]),
            height: cam.then_some(spec.resolution[1]),
            channels: cam.then(|| spec.kind.channels()),
            encoding: cam.then_some(spec.encoding),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireFrame {
    pub name: String,
    pub kind: SensorKind,
    pub width: u32,
    pub height: u32,
    pub channels: u32,
    pub encoding: Encoding,
    /// Base64 of the row-major buffer; float samples are little-endian f32.
    pub data: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireContact {
    pub name: String,
    pub kind: SensorKind,
    /// Front, right, back, left.
    pub flags: [bool; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireMeasurements {
    pub name: String,
    pub kind: SensorKind,
    pub velocity: [f64; 2],
    pub acceleration: f64,
    pub dist_euclid: f64,
    /// -1 when the goal is unreachable.
    pub dist_shortest_path: f64,
    pub direction: [f64; 2],
    pub time_norm: f64,
    pub vector: [f64; 6],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WireReading {
    Frame(WireFrame),
    Contact(WireContact),
    Measurements(WireMeasurements),
}

impl WireFrame {
    pub fn decode(&self) -> Result<Vec<u8>, base64::DecodeError> {
        BASE64.decode(&self.data)
    }
}

fn wire_measurements(name: &str, m: &Measurements) -> WireMeasurements {
    let v = m.as_vector();
    WireMeasurements {
        name: name.to_string(),
        kind: SensorKind::Measurements,
        velocity: m.velocity,
        acceleration: m.acceleration,
        dist_euclid: m.dist_euclid,
        dist_shortest_path: v[1],
        direction: m.direction,
        time_norm: m.time_norm,
        vector: v,
    }
}

pub fn encode_observation(obs: &Observation) -> Vec<WireReading> {
    obs.readings
        .iter()
        .map(|(name, r)| match r {
            Reading::Frame(f) => WireReading::Frame(WireFrame {
                name: name.clone(),
                kind: f.kind,
                width: f.width,
                height: f.height,
                channels: f.channels,
                encoding: f.encoding(),
                data: BASE64.encode(f.to_bytes()),
            }),
            Reading::Contact(c) => WireReading::Contact(WireContact {
                name: name.clone(),
                kind: SensorKind::Contact,
                flags: c.flags,
            }),
            Reading::Measurements(m) => WireReading::Measurements(wire_measurements(name, m)),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Ready {
        session: String,
        version: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sensors: Option<Vec<SensorLayout>>,
    },
    Observation {
        step: u32,
        observation: Vec<WireReading>,
        reward: f64,
        done: bool,
        success: bool,
        /// One-hot goal class: room classes, then object categories.
        goal: Vec<f32>,
    },
    Error {
        code: ErrorCode,
        message: String,
    },
}

impl ServerMessage {
    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        ServerMessage::Error {
            code,
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }
}
