use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::BenchError;

pub const BUILTIN_SUITES: &str = include_str!("../../config/suites.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpisodeTemplate {
    pub max_steps: u32,
    pub success_radius: f64,
    pub min_geodesic: f64,
}

impl Default for EpisodeTemplate {
    fn default() -> Self {
        EpisodeTemplate {
            max_steps: 500,
            success_radius: 0.5,
            min_geodesic: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    /// Inclusive room-count range; scene i gets `rooms[0] + i % span`.
    pub rooms: [u32; 2],
    pub furnished: bool,
    pub scenes: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteFile {
    #[serde(default)]
    pub episode: EpisodeTemplate,
    pub suites: BTreeMap<String, SuiteSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub name: String,
    pub spec: SuiteSpec,
    pub episode: EpisodeTemplate,
}

impl SuiteSpec {
    pub fn rooms_for_scene(&self, i: u32) -> u32 {
        let span = self.rooms[1] - self.rooms[0] + 1;
        self.rooms[0] + i % span
    }

    pub fn size_label(&self) -> String {
        if self.rooms[0] == self.rooms[1] {
            format!("{}", self.rooms[0])
        } else {
            format!("{}-{}", self.rooms[0], self.rooms[1])
        }
    }

    pub fn clutter_label(&self) -> &'static str {
        if self.furnished {
            "furnished"
        } else {
            "empty"
        }
    }

    fn validate(&self, name: &str) -> Result<(), BenchError> {
        if self.rooms[0] == 0 || self.rooms[0] > self.rooms[1] {
            return Err(BenchError::Config(format!(
                "suite {name}: rooms range {:?} must satisfy 1 <= min <= max",
                self.rooms
            )));
        }
        if self.scenes == 0 {
            return Err(BenchError::Empty(format!("suite {name} has no scenes")));
        }
        Ok(())
    }
}

impl SuiteFile {
    pub fn parse(text: &str) -> Result<SuiteFile, BenchError> {
        let f: SuiteFile = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        for (name, s) in &f.suites {
            s.validate(name)?;
        }
        Ok(f)
    }

    pub fn builtin() -> SuiteFile {
        SuiteFile::parse(BUILTIN_SUITES).expect("built-in suites parse")
    }

    pub fn get(&self, name: &str) -> Option<Suite> {
        self.suites.get(name).map(|spec| Suite {
            name: name.to_string(),
            spec: spec.clone(),
            episode: self.episode.clone(),
        })
    }
}

/// A built-in suite name, or a TOML file containing exactly one suite.
pub fn load_suite(name_or_path: &str) -> Result<Suite, BenchError> {
    if let Some(s) = SuiteFile::builtin().get(name_or_path) {
        return Ok(s);
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        let known: Vec<String> = SuiteFile::builtin().suites.into_keys().collect();
        return Err(BenchError::Config(format!(
            "unknown suite {name_or_path:?}; built-in suites: {}",
            known.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
    let file = SuiteFile::parse(&text)?;
    match file.suites.len() {
        1 => {
            let name = file.suites.keys().next().expect("one suite").clone();
            Ok(file.get(&name).expect("suite exists"))
        }
        n => Err(BenchError::Config(format!(
            "{} defines {n} suites; a suite file must define exactly one",
            path.display()
        ))),
    }
}
