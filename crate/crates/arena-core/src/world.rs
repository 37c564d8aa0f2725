//! World state, spawning and the kinematic step for the omnidirectional
//! robots. Steps are pure: (state, actions, config) fully determine the
//! next state, so identical seeds and action sequences replay bit-exactly.

use crate::config::WorldConfig;
use crate::geometry::{wrap_angle, Obstacle, Vec2};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RobotId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Team {
    Ally,
    Enemy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub team: Team,
    pub pos: Vec2,
    /// Heading ψ, wrapped to (−π, π]. The laser emitter and camera optical
    /// axis both point along the heading.
    pub heading: f32,
    /// Latched true once this robot has collided during the episode.
    pub collided: bool,
}

/// Per-robot velocity command in the body frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Action {
    pub vx: f32,
    pub vy: f32,
    pub omega: f32,
}

impl Action {
    pub const ZERO: Action = Action { vx: 0.0, vy: 0.0, omega: 0.0 };

    pub fn new(vx: f32, vy: f32, omega: f32) -> Self {
        Action { vx, vy, omega }
    }

    /// Clamp the linear speed to v_max (preserving direction) and the
    /// angular rate to ±omega_max. Idempotent.
    pub fn clamped(self, cfg: &WorldConfig) -> Action {
        let mut vx = self.vx;
        let mut vy = self.vy;
        let norm = (vx * vx + vy * vy).sqrt();
        if norm > cfg.v_max {
            let s = cfg.v_max / norm;
            vx *= s;
            vy *= s;
        }
        Action { vx, vy, omega: self.omega.clamp(-cfg.omega_max, cfg.omega_max) }
    }

    pub fn as_array(self) -> [f32; 3] {
        [self.vx, self.vy, self.omega]
    }
}

/// Collision outcome of one robot for one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StepFlags {
    pub obstacle: bool,
    pub boundary: bool,
    pub robot: bool,
}

impl StepFlags {
    pub fn any(self) -> bool {
        self.obstacle || self.boundary || self.robot
    }
}

#[derive(Debug, Clone)]
pub struct WorldState {
    pub frame: u32,
    pub arena_side: f32,
    pub robots: Vec<RobotState>,
    pub obstacles: Vec<Obstacle>,
    pub rng: ChaCha8Rng,
}

#[derive(Debug, thiserror::Error)]
pub enum SpawnError {
    #[error("config rejected: {0}")]
    Config(#[from] crate::config::ConfigError),
    #[error("rejection sampling exhausted after {0} attempts")]
    SamplingExhausted(usize),
}

const MAX_SPAWN_ATTEMPTS: usize = 10_000;

/// What a cast ray hit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitBody {
    Boundary,
    Obstacle(usize),
    Robot(RobotId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub t: f32,
    pub body: HitBody,
}

impl WorldState {
    pub fn robot(&self, id: RobotId) -> &RobotState {
        &self.robots[id.0]
    }

    pub fn ids(&self) -> impl Iterator<Item = RobotId> {
        (0..self.robots.len()).map(RobotId)
    }

    pub fn allies(&self) -> impl Iterator<Item = RobotId> + '_ {
        self.ids().filter(|id| self.robots[id.0].team == Team::Ally)
    }

    pub fn enemies(&self) -> impl Iterator<Item = RobotId> + '_ {
        self.ids().filter(|id| self.robots[id.0].team == Team::Enemy)
    }

    /// Nearest robot of `team` to robot `from`, excluding `from` itself.
    pub fn nearest_of_team(&self, from: RobotId, team: Team) -> Option<RobotId> {
        let p = self.robots[from.0].pos;
        self.ids()
            .filter(|id| *id != from && self.robots[id.0].team == team)
            .min_by(|a, b| {
                let da = self.robots[a.0].pos.dist(p);
                let db = self.robots[b.0].pos.dist(p);
                da.partial_cmp(&db).unwrap().then(a.0.cmp(&b.0))
            })
    }

    /// Signed bearing of a point in `from`'s local frame (CCW positive).
    pub fn bearing_to(&self, from: RobotId, target: Vec2) -> f32 {
        let r = &self.robots[from.0];
        let d = target - r.pos;
        wrap_angle(d.y.atan2(d.x) - r.heading)
    }

    /// First body hit by a ray from `origin` along `dir` (unit not required),
    /// checking obstacles, all robots except `ignore`, and the arena walls.
    /// Ties at equal parameter resolve to the obstacle.
    pub fn raycast(&self, origin: Vec2, dir: Vec2, ignore: Option<RobotId>, robot_radius: f32) -> RayHit {
        let mut best = RayHit { t: crate::geometry::ray_arena_exit(origin, dir, self.arena_side), body: HitBody::Boundary };
        for (i, r) in self.robots.iter().enumerate() {
            if Some(RobotId(i)) == ignore {
                continue;
            }
            if let Some(t) = crate::geometry::ray_circle(origin, dir, r.pos, robot_radius) {
                if t < best.t || (t == best.t && best.body == HitBody::Boundary) {
                    best = RayHit { t, body: HitBody::Robot(RobotId(i)) };
                }
            }
        }
        for (i, ob) in self.obstacles.iter().enumerate() {
            if let Some(t) = ob.ray_hit(origin, dir) {
                if t <= best.t {
                    best = RayHit { t, body: HitBody::Obstacle(i) };
                }
            }
        }
        best
    }
}

/// Place obstacles and robots for a fresh episode.
///
/// Obstacles come from the explicit layout when given, otherwise they are
/// rejection-sampled to the requested count and density. Robots spawn
/// collision-free with random pose; the enemy is resampled until it lies in
/// at least one ally's camera FOV.
pub fn spawn_world(cfg: &WorldConfig) -> Result<WorldState, SpawnError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut attempts = 0usize;

    let obstacles = match &cfg.obstacles {
        Some(o) => o.clone(),
        None => sample_obstacles(cfg, &mut rng, &mut attempts)?,
    };

    let mut robots: Vec<RobotState> = Vec::with_capacity(cfg.num_robots());
    let r = cfg.robot_radius;
    for k in 0..cfg.num_robots() {
        let team = if k < cfg.num_allies { Team::Ally } else { Team::Enemy };
        loop {
            attempts += 1;
            if attempts > MAX_SPAWN_ATTEMPTS {
                return Err(SpawnError::SamplingExhausted(attempts));
            }
            let pos = Vec2::new(
                rng.gen_range(r..cfg.arena_side - r),
                rng.gen_range(r..cfg.arena_side - r),
            );
            let heading = wrap_angle(rng.gen_range(-crate::geometry::PI..crate::geometry::PI));
            if obstacles.iter().any(|o| o.signed_distance(pos) < r) {
                continue;
            }
            if robots.iter().any(|o| o.pos.dist(pos) < 2.0 * r) {
                continue;
            }
            if team == Team::Enemy {
                let visible = robots.iter().take(cfg.num_allies).any(|a| {
                    let d = pos - a.pos;
                    wrap_angle(d.y.atan2(d.x) - a.heading).abs() <= cfg.fov / 2.0
                });
                if !visible {
                    continue;
                }
            }
            robots.push(RobotState { team, pos, heading, collided: false });
            break;
        }
    }

    Ok(WorldState { frame: 0, arena_side: cfg.arena_side, robots, obstacles, rng })
}

fn sample_obstacles(
    cfg: &WorldConfig,
    rng: &mut ChaCha8Rng,
    attempts: &mut usize,
) -> Result<Vec<Obstacle>, SpawnError> {
    let mut out: Vec<Obstacle> = Vec::with_capacity(cfg.obstacle_count);
    if cfg.obstacle_count == 0 || cfg.obstacle_density <= 0.0 {
        return Ok(out);
    }
    let side = cfg.arena_side;
    let per_area = cfg.obstacle_density * side * side / cfg.obstacle_count as f32;
    for _ in 0..cfg.obstacle_count {
        loop {
            *attempts += 1;
            if *attempts > MAX_SPAWN_ATTEMPTS {
                return Err(SpawnError::SamplingExhausted(*attempts));
            }
            let circle: bool = rng.gen();
            let candidate = if circle {
                let radius = (per_area / crate::geometry::PI).sqrt();
                let c = Vec2::new(
                    rng.gen_range(radius..side - radius),
                    rng.gen_range(radius..side - radius),
                );
                Obstacle::Circle { center: c, radius }
            } else {
                let aspect = rng.gen_range(0.5..2.0f32);
                let hx = (per_area * aspect).sqrt() / 2.0;
                let hy = per_area / (4.0 * hx);
                let c = Vec2::new(rng.gen_range(hx..side - hx), rng.gen_range(hy..side - hy));
                Obstacle::Rect { center: c, half: Vec2::new(hx, hy) }
            };
            // keep a robot-width corridor between obstacles so the arena
            // stays traversable
            let clearance = 2.5 * cfg.robot_radius;
            let ok = out.iter().all(|o| {
                !candidate.overlaps(o)
                    && o.signed_distance(obstacle_center(&candidate))
                        > obstacle_outer_radius(&candidate) + clearance
            });
            if ok {
                out.push(candidate);
                break;
            }
        }
    }
    Ok(out)
}

fn obstacle_center(o: &Obstacle) -> Vec2 {
    match *o {
        Obstacle::Rect { center, .. } | Obstacle::Circle { center, .. } => center,
    }
}

fn obstacle_outer_radius(o: &Obstacle) -> f32 {
    match *o {
        Obstacle::Rect { half, .. } => half.norm(),
        Obstacle::Circle { radius, .. } => radius,
    }
}

/// Advance the world one frame. Robots integrate holonomically
/// (global velocity = body velocity rotated by the heading), actions are
/// clamped to limits, and colliding robots stop at contact.
pub fn step(world: &WorldState, actions: &[Action], cfg: &WorldConfig) -> (WorldState, Vec<StepFlags>) {
    assert_eq!(actions.len(), world.robots.len(), "one action per robot");
    let mut next = world.clone();
    let mut flags = vec![StepFlags::default(); world.robots.len()];
    for i in 0..next.robots.len() {
        let act = actions[i].clamped(cfg);
        let heading = next.robots[i].heading;
        let v_global = Vec2::new(act.vx, act.vy).rotated(heading);
        let start = next.robots[i].pos;
        let mut target = start + v_global * cfg.dt;

        // walls: clamp the endpoint so the disc stays inside; robots slide
        // along walls rather than sticking to them
        let r = cfg.robot_radius;
        let lo = r;
        let hi = cfg.arena_side - r;
        let clamped = Vec2::new(target.x.clamp(lo, hi), target.y.clamp(lo, hi));
        if clamped != target {
            flags[i].boundary = true;
            target = clamped;
        }

        // earliest obstacle / robot contact along the (possibly clamped)
        // straight segment; stop there
        let delta = target - start;
        let mut t_stop = 1.0f32;
        for (oi, ob) in next.obstacles.iter().enumerate() {
            if let Some(t) = first_contact(start, delta, |p| ob.signed_distance(p) - r) {
                if t <= t_stop {
                    t_stop = t;
                    flags[i].obstacle = true;
                    let _ = oi;
                }
            }
        }
        for j in 0..next.robots.len() {
            if j == i {
                continue;
            }
            let other = next.robots[j].pos;
            if let Some(t) = first_contact(start, delta, |p| (p - other).norm() - 2.0 * r) {
                if t < t_stop {
                    t_stop = t;
                    flags[i].robot = true;
                    flags[i].obstacle = false;
                }
            }
        }
        let end = if t_stop < 1.0 {
            start + delta * (t_stop - CONTACT_BACKOFF).max(0.0)
        } else {
            target
        };

        next.robots[i].pos = end;
        next.robots[i].heading = wrap_angle(heading + act.omega * cfg.dt);
        if flags[i].any() {
            next.robots[i].collided = true;
        }
    }
    next.frame += 1;
    (next, flags)
}

const CONTACT_BACKOFF: f32 = 1e-4;

/// Earliest t in [0, 1] where `sd(start + t * delta)` becomes negative,
/// found by sampling plus bisection. Returns None when the whole segment
/// stays clear. Per-frame motion is far smaller than the robot radius, so
/// 16 samples cannot skip over a contact interval.
fn first_contact(start: Vec2, delta: Vec2, sd: impl Fn(Vec2) -> f32) -> Option<f32> {
    const SAMPLES: usize = 16;
    if sd(start) <= 0.0 {
        // already in contact; any inward motion stops immediately
        let probe = start + delta * (1.0 / SAMPLES as f32);
        return if sd(probe) <= sd(start) { Some(0.0) } else { None };
    }
    let mut prev_t = 0.0f32;
    for k in 1..=SAMPLES {
        let t = k as f32 / SAMPLES as f32;
        if sd(start + delta * t) < 0.0 {
            // bisect in (prev_t, t]
            let mut lo = prev_t;
            let mut hi = t;
            for _ in 0..32 {
                let mid = 0.5 * (lo + hi);
                if sd(start + delta * mid) < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(lo);
        }
        prev_t = t;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty_cfg() -> WorldConfig {
        WorldConfig { v_max: 0.4, obstacles: Some(vec![]), ..WorldConfig::default() }
    }

    fn single_robot_world(cfg: &WorldConfig, pos: Vec2, heading: f32) -> WorldState {
        WorldState {
            frame: 0,
            arena_side: cfg.arena_side,
            robots: vec![
                RobotState { team: Team::Ally, pos, heading, collided: false },
                RobotState { team: Team::Enemy, pos: Vec2::new(3.5, 3.5), heading: 0.0, collided: false },
            ],
            obstacles: cfg.obstacles.clone().unwrap_or_default(),
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }

    #[test]
    fn zero_action_is_identity() {
        let cfg = empty_cfg();
        let w = single_robot_world(&cfg, Vec2::new(2.0, 2.0), 0.7);
        let (w2, f) = step(&w, &[Action::ZERO, Action::ZERO], &cfg);
        assert_eq!(w2.robots[0].pos, w.robots[0].pos);
        assert_eq!(w2.robots[0].heading, w.robots[0].heading);
        assert!(!f[0].any());
    }

    #[test]
    fn forward_motion_advances_v_dt() {
        let cfg = empty_cfg();
        let w = single_robot_world(&cfg, Vec2::new(1.0, 1.0), 0.0);
        let (w2, _) = step(&w, &[Action::new(0.4, 0.0, 0.0), Action::ZERO], &cfg);
        let expected = 1.0f32 + 0.4f32 * 0.035f32;
        assert_eq!(w2.robots[0].pos.x, expected);
        assert_eq!(w2.robots[0].pos.y, 1.0);
    }

    #[test]
    fn heading_rotates_body_velocity() {
        let cfg = empty_cfg();
        let w = single_robot_world(&cfg, Vec2::new(2.0, 2.0), crate::geometry::PI / 2.0);
        let (w2, _) = step(&w, &[Action::new(0.2, 0.0, 0.0), Action::ZERO], &cfg);
        // facing +y: body-frame forward motion moves +y
        assert!((w2.robots[0].pos.y - (2.0 + 0.2 * 0.035)).abs() < 1e-6);
        assert!((w2.robots[0].pos.x - 2.0).abs() < 1e-6);
    }

    #[test]
    fn wall_stops_and_flags() {
        let cfg = empty_cfg();
        let w = single_robot_world(&cfg, Vec2::new(cfg.arena_side - cfg.robot_radius - 0.001, 2.0), 0.0);
        let mut world = w;
        for _ in 0..5 {
            let (w2, f) = step(&world, &[Action::new(0.4, 0.0, 0.0), Action::ZERO], &cfg);
            world = w2;
            if f[0].boundary {
                break;
            }
        }
        assert_eq!(world.robots[0].pos.x, cfg.arena_side - cfg.robot_radius);
    }

    #[test]
    fn clamping_is_idempotent() {
        let cfg = WorldConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let a = Action::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-5.0..5.0),
            );
            let once = a.clamped(&cfg);
            let twice = once.clamped(&cfg);
            assert_eq!(once, twice);
            assert!((once.vx * once.vx + once.vy * once.vy).sqrt() <= cfg.v_max + 1e-6);
            assert!(once.omega.abs() <= cfg.omega_max);
        }
    }

    #[test]
    fn spawn_is_deterministic() {
        let mut cfg = WorldConfig::default();
        cfg.seed = 42;
        cfg.obstacle_count = 4;
        cfg.obstacle_density = 0.08;
        cfg.obstacles = None;
        let a = spawn_world(&cfg).unwrap();
        let b = spawn_world(&cfg).unwrap();
        assert_eq!(a.robots.len(), b.robots.len());
        for (ra, rb) in a.robots.iter().zip(&b.robots) {
            assert_eq!(ra.pos, rb.pos);
            assert_eq!(ra.heading, rb.heading);
        }
        assert_eq!(a.obstacles, b.obstacles);
    }

    #[test]
    fn spawned_enemy_visible_to_an_ally() {
        for seed in 0..50u64 {
            let mut cfg = WorldConfig::default();
            cfg.seed = seed;
            cfg.num_allies = 2;
            let w = spawn_world(&cfg).unwrap();
            assert_eq!(w.robots.len(), 3);
            let enemy = w.enemies().next().unwrap();
            let epos = w.robot(enemy).pos;
            let visible = w.allies().any(|a| w.bearing_to(a, epos).abs() <= cfg.fov / 2.0);
            assert!(visible, "seed {seed}: enemy spawned outside every ally FOV");
        }
    }

    #[test]
    fn spawn_density_matches_request() {
        let mut cfg = WorldConfig::default();
        cfg.seed = 3;
        cfg.obstacle_count = 5;
        cfg.obstacle_density = 0.10;
        let w = spawn_world(&cfg).unwrap();
        let area: f32 = w.obstacles.iter().map(|o| o.area()).sum();
        let density = area / (cfg.arena_side * cfg.arena_side);
        assert!((density - 0.10).abs() < 0.02, "sampled density {density}");
    }

    #[test]
    fn no_tunneling_through_obstacles() {
        // random worlds + random pushes: the robot center must never end a
        // frame inside an obstacle, and the swept path must stay outside too
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for scene in 0..60u64 {
            let mut cfg = WorldConfig::default();
            cfg.seed = scene;
            cfg.v_max = 0.40;
            cfg.dt = 0.05;
            cfg.obstacle_count = 5;
            cfg.obstacle_density = 0.12;
            let mut world = spawn_world(&cfg).unwrap();
            for _ in 0..40 {
                let acts: Vec<Action> = (0..world.robots.len())
                    .map(|_| {
                        Action::new(
                            rng.gen_range(-0.4..0.4),
                            rng.gen_range(-0.4..0.4),
                            rng.gen_range(-2.5..2.5),
                        )
                    })
                    .collect();
                let prev: Vec<Vec2> = world.robots.iter().map(|r| r.pos).collect();
                let (w2, _) = step(&world, &acts, &cfg);
                for (i, r) in w2.robots.iter().enumerate() {
                    for ob in &w2.obstacles {
                        // center must not cross the obstacle boundary anywhere
                        // along the frame's motion
                        for k in 0..=20 {
                            let t = k as f32 / 20.0;
                            let p = prev[i] + (r.pos - prev[i]) * t;
                            assert!(
                                ob.signed_distance(p) > 0.0,
                                "scene {scene}: robot center entered an obstacle"
                            );
                        }
                    }
                }
                world = w2;
            }
        }
    }
}
