//! Headless, deterministic indoor navigation simulator.
//!
//! Houses come from a JSON scene format or a procedural generator
//! ([`scene`]). A cylinder agent moves through them under two control presets
//! ([`physics`]), observes the world through raycast cameras, contact sensors
//! and goal measurements ([`sensors`]), and runs goal-directed episodes
//! ([`task`]) whose reachability is checked on an occupancy grid ([`nav`]).
//! [`server`] exposes sessions over WebSocket and [`bench`] runs scripted
//! baselines and throughput probes.

pub mod bench;
pub mod geom;
pub mod nav;
pub mod physics;
pub mod scene;
pub mod seed;
pub mod sensors;
pub mod server;
pub mod sim;
pub mod task;
