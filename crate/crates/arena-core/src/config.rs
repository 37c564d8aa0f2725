//! World configuration: arena dimensions, robot limits, firing model and
//! obstacle layout. Loads from a TOML file; every field has a documented
//! default so partial files work.

use crate::geometry::Obstacle;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("toml parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldConfig {
    /// Side length of the square arena in meters.
    pub arena_side: f32,
    pub num_allies: usize,
    pub num_enemies: usize,
    /// Disc footprint radius of every robot in meters.
    pub robot_radius: f32,
    /// Linear speed limit applied to both teams, m/s.
    pub v_max: f32,
    /// Angular speed limit, rad/s.
    pub omega_max: f32,
    /// Simulation step, seconds per frame.
    pub dt: f32,
    /// Frames per episode.
    pub episode_len: u32,
    /// Horizontal camera field of view, radians.
    pub fov: f32,
    /// Aim-error threshold under which the emitter fires, radians.
    pub fire_angle: f32,
    /// Maximum firing distance, meters.
    pub fire_range: f32,
    /// [min, max] robot detection distance, meters.
    pub detect_range: [f32; 2],
    /// Number of obstacles sampled when no explicit layout is given.
    pub obstacle_count: usize,
    /// Target obstacle area / arena area when sampling, in [0, 0.18].
    pub obstacle_density: f32,
    /// Explicit obstacle layout; when set, sampling is skipped.
    pub obstacles: Option<Vec<Obstacle>>,
    pub seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            arena_side: 4.0,
            num_allies: 1,
            num_enemies: 1,
            robot_radius: 0.15,
            v_max: 0.2,
            omega_max: 2.5,
            dt: 0.035,
            episode_len: 2000,
            // 110 degree FOV
            fov: 110.0f32.to_radians(),
            // 50 px aim window mapped through a 224 px wide, 110 degree image
            fire_angle: (50.0f32 * 110.0 / 224.0).to_radians(),
            fire_range: 3.0,
            detect_range: [0.5, 3.0],
            obstacle_count: 0,
            obstacle_density: 0.0,
            obstacles: None,
            seed: 0,
        }
    }
}

impl WorldConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: String| Err(ConfigError::Invalid(m));
        if !(self.arena_side > 0.0) {
            return fail(format!("arena_side must be positive, got {}", self.arena_side));
        }
        if !(1..=3).contains(&self.num_allies) {
            return fail(format!("num_allies must be in 1..=3, got {}", self.num_allies));
        }
        if self.num_enemies != 1 {
            return fail(format!("num_enemies must be 1, got {}", self.num_enemies));
        }
        if !(0.05..=0.40).contains(&self.v_max) {
            return fail(format!("v_max must be in [0.05, 0.40], got {}", self.v_max));
        }
        if !(self.robot_radius > 0.0 && self.robot_radius * 4.0 < self.arena_side) {
            return fail(format!("robot_radius {} incompatible with arena", self.robot_radius));
        }
        if !(self.dt > 0.0 && self.dt <= 0.05) {
            return fail(format!("dt must be in (0, 0.05], got {}", self.dt));
        }
        if !(self.omega_max > 0.0) || !(self.fire_range > 0.0) || !(self.fov > 0.0) {
            return fail("omega_max, fire_range and fov must be positive".into());
        }
        if !(self.detect_range[0] > 0.0 && self.detect_range[0] < self.detect_range[1]) {
            return fail(format!("bad detect_range {:?}", self.detect_range));
        }
        if self.obstacle_count > 8 {
            return fail(format!("obstacle_count must be <= 8, got {}", self.obstacle_count));
        }
        if !(0.0..=0.18).contains(&self.obstacle_density) {
            return fail(format!(
                "obstacle_density must be in [0, 0.18], got {}",
                self.obstacle_density
            ));
        }
        if let Some(obs) = &self.obstacles {
            if obs.len() > 8 {
                return fail(format!("at most 8 obstacles allowed, got {}", obs.len()));
            }
            let area: f32 = obs.iter().map(|o| o.area()).sum();
            let density = area / (self.arena_side * self.arena_side);
            if density > 0.18 + 1e-6 {
                return fail(format!("obstacle density {density:.3} exceeds 0.18"));
            }
            for (i, o) in obs.iter().enumerate() {
                if !o.inside_arena(self.arena_side) {
                    return fail(format!("obstacle {i} extends outside the arena"));
                }
                if min_extent(o) < 0.05 {
                    return fail(format!("obstacle {i} thinner than 0.05 m"));
                }
                for (j, p) in obs.iter().enumerate().take(i) {
                    if o.overlaps(p) {
                        return fail(format!("obstacles {j} and {i} overlap"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: WorldConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn num_robots(&self) -> usize {
        self.num_allies + self.num_enemies
    }
}

fn min_extent(o: &Obstacle) -> f32 {
    match *o {
        Obstacle::Rect { half, .. } => 2.0 * half.x.min(half.y),
        Obstacle::Circle { radius, .. } => 2.0 * radius,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;

    #[test]
    fn default_is_valid_and_matches_episode_duration() {
        let cfg = WorldConfig::default();
        cfg.validate().unwrap();
        let duration = cfg.dt * cfg.episode_len as f32;
        assert!((duration - 70.0).abs() < 0.5, "episode lasts {duration} s");
    }

    #[test]
    fn density_cap_enforced() {
        let mut cfg = WorldConfig::default();
        cfg.obstacle_density = 0.25;
        assert!(cfg.validate().is_err());
        cfg.obstacle_density = 0.18;
        cfg.obstacle_count = 8;
        cfg.validate().unwrap();
    }

    #[test]
    fn eight_rect_obstacles_density_ok() {
        // 8 rectangles of 0.3 x 0.3 m in a 4 x 4 arena: density 0.045
        let mut cfg = WorldConfig::default();
        let mut obs = Vec::new();
        for i in 0..8 {
            let x = 0.5 + (i % 4) as f32;
            let y = if i < 4 { 1.0 } else { 3.0 };
            obs.push(Obstacle::Rect { center: Vec2::new(x, y), half: Vec2::new(0.15, 0.15) });
        }
        let area: f32 = obs.iter().map(|o| o.area()).sum();
        assert!((area / 16.0 - 0.045).abs() < 1e-6);
        cfg.obstacles = Some(obs);
        cfg.validate().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let cfg = WorldConfig::default();
        let s = cfg.to_toml_string();
        let back = WorldConfig::from_toml_str(&s).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn partial_toml_uses_defaults() {
        let cfg = WorldConfig::from_toml_str("v_max = 0.4\nseed = 7\n").unwrap();
        assert_eq!(cfg.v_max, 0.4);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.arena_side, 4.0);
    }
}
