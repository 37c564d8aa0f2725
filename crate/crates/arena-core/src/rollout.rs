//! Policy interface and the episode runner. Policies map world state to
//! actions for one robot; the runner wires them to the simulator and
//! assembles the episode log.

use crate::config::WorldConfig;
use crate::fire::{check_fire, FireEvent};
use crate::geometry::{wrap_angle, Vec2};
use crate::log::{EpisodeLog, FrameRecord, RobotFrame};
use crate::world::{spawn_world, step, Action, RobotId, SpawnError, StepFlags, Team, WorldState};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub trait Policy: Send {
    /// Called once at episode start. `seed` is the per-episode seed for
    /// stochastic policies; deterministic ones ignore it.
    fn reset(&mut self, _seed: u64) {}

    fn act(&mut self, world: &WorldState, cfg: &WorldConfig, id: RobotId) -> Action;
}

/// Stands still. The degenerate comparison baseline.
pub struct ZeroPolicy;

impl Policy for ZeroPolicy {
    fn act(&mut self, _: &WorldState, _: &WorldConfig, _: RobotId) -> Action {
        Action::ZERO
    }
}

/// Uniform random commands within the action bounds.
pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        RandomPolicy { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Policy for RandomPolicy {
    fn reset(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    fn act(&mut self, _: &WorldState, cfg: &WorldConfig, _: RobotId) -> Action {
        Action::new(
            self.rng.gen_range(-cfg.v_max..=cfg.v_max),
            self.rng.gen_range(-cfg.v_max..=cfg.v_max),
            self.rng.gen_range(-cfg.omega_max..=cfg.omega_max),
        )
        .clamped(cfg)
    }
}

/// Deterministic evader: flees the nearest pursuer while repelling from
/// walls and obstacles, turning toward its direction of motion. Used as the
/// fixed opponent so every evaluated method faces the same adversary.
pub struct ScriptedEvader {
    pub wall_margin: f32,
    pub obstacle_margin: f32,
    pub turn_gain: f32,
}

impl Default for ScriptedEvader {
    fn default() -> Self {
        ScriptedEvader { wall_margin: 0.6, obstacle_margin: 0.5, turn_gain: 2.0 }
    }
}

impl Policy for ScriptedEvader {
    fn act(&mut self, world: &WorldState, cfg: &WorldConfig, id: RobotId) -> Action {
        let me = world.robot(id);
        let mut v = Vec2::ZERO;
        for other in world.ids() {
            if other == id || world.robot(other).team == me.team {
                continue;
            }
            let away = me.pos - world.robot(other).pos;
            let d = away.norm().max(1e-3);
            v = v + away * (1.0 / (d * d));
        }
        // wall repulsion
        let m = self.wall_margin;
        if me.pos.x < m {
            v.x += (m - me.pos.x) / m * 2.0;
        }
        if me.pos.y < m {
            v.y += (m - me.pos.y) / m * 2.0;
        }
        if me.pos.x > world.arena_side - m {
            v.x -= (me.pos.x - (world.arena_side - m)) / m * 2.0;
        }
        if me.pos.y > world.arena_side - m {
            v.y -= (me.pos.y - (world.arena_side - m)) / m * 2.0;
        }
        for ob in &world.obstacles {
            let sd = ob.signed_distance(me.pos) - cfg.robot_radius;
            if sd < self.obstacle_margin {
                let grad = (me.pos - ob.closest_point(me.pos)).normalized();
                v = v + grad * ((self.obstacle_margin - sd) / self.obstacle_margin * 2.0);
            }
        }
        let v_global = v.normalized() * cfg.v_max;
        let body = v_global.rotated(-me.heading);
        let omega = if v_global.norm() > 1e-6 {
            (self.turn_gain * wrap_angle(v_global.angle() - me.heading))
                .clamp(-cfg.omega_max, cfg.omega_max)
        } else {
            0.0
        };
        Action::new(body.x, body.y, omega).clamped(cfg)
    }
}

/// Per-step context handed to the rollout observer.
pub struct StepContext<'a> {
    /// State the policies acted on.
    pub pre: &'a WorldState,
    pub actions: &'a [Action],
    /// State after integration.
    pub post: &'a WorldState,
    pub flags: &'a [StepFlags],
    pub fires: &'a [FireEvent],
}

/// Spawn a world from `cfg` and run `frames` steps under the given
/// per-robot policies. The observer sees every transition; the returned log
/// carries the full trajectory.
pub fn run_episode(
    cfg: &WorldConfig,
    policies: &mut [&mut dyn Policy],
    frames: u32,
    mut observer: impl FnMut(&StepContext),
) -> Result<(EpisodeLog, WorldState), SpawnError> {
    let mut world = spawn_world(cfg)?;
    assert_eq!(policies.len(), world.robots.len(), "one policy per robot");
    for (i, p) in policies.iter_mut().enumerate() {
        p.reset(cfg.seed.wrapping_add(i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    }
    let teams: Vec<Team> = world.robots.iter().map(|r| r.team).collect();
    let mut log = EpisodeLog { frames: Vec::with_capacity(frames as usize), teams };
    for _ in 0..frames {
        let actions: Vec<Action> = policies
            .iter_mut()
            .enumerate()
            .map(|(i, p)| p.act(&world, cfg, RobotId(i)).clamped(cfg))
            .collect();
        let (next, flags) = step(&world, &actions, cfg);
        let fires: Vec<FireEvent> =
            next.allies().filter_map(|id| check_fire(&next, id, cfg)).collect();
        observer(&StepContext { pre: &world, actions: &actions, post: &next, flags: &flags, fires: &fires });
        log.frames.push(FrameRecord {
            frame: next.frame - 1,
            robots: next
                .robots
                .iter()
                .zip(&actions)
                .zip(&flags)
                .map(|((r, a), f)| RobotFrame {
                    pos_x: r.pos.x,
                    pos_y: r.pos.y,
                    heading: r.heading,
                    action: *a,
                    flags: *f,
                })
                .collect(),
            fires,
        });
        world = next;
    }
    Ok((log, world))
}
