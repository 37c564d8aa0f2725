//! Laser firing model: the aim/range trigger condition, occlusion-aware
//! hit resolution and the cross-fire corridor used by the reward shaping.

use crate::config::WorldConfig;
use crate::geometry::{point_segment_distance, Vec2};
use crate::world::{HitBody, RobotId, Team, WorldState};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Blocker {
    None,
    Obstacle,
    Ally,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FireEvent {
    pub shooter: RobotId,
    /// The enemy id when the ray's first intersection is the enemy disc.
    pub target: Option<RobotId>,
    pub frame: u32,
    pub blocked_by: Blocker,
}

/// Absolute aim error of `shooter` toward the enemy: |θ_i − θ_e| with both
/// angles wrapped, i.e. the magnitude of the enemy bearing in the shooter's
/// local frame (the emitter points along the heading).
pub fn aim_error(world: &WorldState, shooter: RobotId, enemy: RobotId) -> f32 {
    world.bearing_to(shooter, world.robot(enemy).pos).abs()
}

/// Evaluate the firing condition for an ally and resolve the shot.
///
/// Fires iff the enemy bearing error is under `fire_angle` and the enemy is
/// closer than `fire_range`. The emitted ray runs along the shooter's
/// heading; whatever it meets first decides between a hit and an occlusion.
pub fn check_fire(world: &WorldState, shooter: RobotId, cfg: &WorldConfig) -> Option<FireEvent> {
    debug_assert_eq!(world.robot(shooter).team, Team::Ally);
    let enemy = world.nearest_of_team(shooter, Team::Enemy)?;
    let s = world.robot(shooter);
    let d = s.pos.dist(world.robot(enemy).pos);
    if d >= cfg.fire_range || aim_error(world, shooter, enemy) >= cfg.fire_angle {
        return None;
    }
    let dir = Vec2::new(s.heading.cos(), s.heading.sin());
    let hit = world.raycast(s.pos, dir, Some(shooter), cfg.robot_radius);
    let (target, blocked_by) = match hit.body {
        HitBody::Robot(id) if id == enemy => (Some(enemy), Blocker::None),
        HitBody::Robot(_) => (None, Blocker::Ally),
        HitBody::Obstacle(_) => (None, Blocker::Obstacle),
        HitBody::Boundary => (None, Blocker::None),
    };
    Some(FireEvent { shooter, target, frame: world.frame, blocked_by })
}

/// Teammates inside the shooter's firing corridor: allies whose disc
/// intersects the strip of half-width `robot_radius` around the
/// shooter-to-enemy segment (so centers within 2·robot_radius of it).
pub fn cross_fire_zone(world: &WorldState, shooter: RobotId, cfg: &WorldConfig) -> Vec<RobotId> {
    let Some(enemy) = world.nearest_of_team(shooter, Team::Enemy) else {
        return Vec::new();
    };
    let a = world.robot(shooter).pos;
    let b = world.robot(enemy).pos;
    world
        .allies()
        .filter(|id| *id != shooter)
        .filter(|id| point_segment_distance(world.robot(*id).pos, a, b) <= 2.0 * cfg.robot_radius)
        .collect()
}
