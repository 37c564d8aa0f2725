//! Deterministic 2D multi-robot laser-tag arena.
//!
//! The crate owns the game's physical truth: world state, holonomic robot
//! kinematics with collision stopping, the laser firing model with
//! occlusion, obstacle layouts, episode logging and bit-exact binary
//! replays. Everything is a pure function of (state, actions, config), so a
//! seed plus an action sequence reproduces a trajectory exactly.

pub mod config;
pub mod fire;
pub mod geometry;
pub mod log;
pub mod rollout;
pub mod world;

pub use config::{ConfigError, WorldConfig};
pub use fire::{aim_error, check_fire, cross_fire_zone, Blocker, FireEvent};
pub use geometry::{wrap_angle, Obstacle, Vec2};
pub use log::{EpisodeLog, Replay, ReplayError};
pub use rollout::{run_episode, Policy, RandomPolicy, ScriptedEvader, StepContext, ZeroPolicy};
pub use world::{
    spawn_world, step, Action, HitBody, RayHit, RobotId, RobotState, SpawnError, StepFlags, Team,
    WorldState,
};
