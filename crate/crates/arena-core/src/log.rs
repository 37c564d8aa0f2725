//! Episode logging: per-frame trajectory records, CSV export and a compact
//! binary replay format that re-simulates bit-exactly.

use crate::config::WorldConfig;
use crate::fire::{Blocker, FireEvent};
use crate::world::{spawn_world, step, Action, RobotId, SpawnError, StepFlags, Team, WorldState};
use std::io::{self, Read, Write};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct RobotFrame {
    pub pos_x: f32,
    pub pos_y: f32,
    pub heading: f32,
    pub action: Action,
    pub flags: StepFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub frame: u32,
    pub robots: Vec<RobotFrame>,
    pub fires: Vec<FireEvent>,
}

/// Ordered per-frame record of one episode: poses, actions, collision flags
/// and fire events. Everything downstream (metrics, replay buffers, DAgger
/// datasets) is derived from this.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpisodeLog {
    pub frames: Vec<FrameRecord>,
    pub teams: Vec<Team>,
}

impl EpisodeLog {
    /// Per-frame flag: some ally's shot struck the enemy that frame.
    pub fn hit_flags(&self) -> Vec<bool> {
        self.frames
            .iter()
            .map(|f| f.fires.iter().any(|e| e.target.is_some()))
            .collect()
    }

    /// True when any ally collided with an obstacle or the boundary in any
    /// frame (the collision-rate trigger).
    pub fn ally_collision(&self) -> bool {
        self.frames.iter().any(|f| {
            f.robots
                .iter()
                .zip(&self.teams)
                .any(|(r, t)| *t == Team::Ally && (r.flags.obstacle || r.flags.boundary))
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "frame,robot,team,x,y,heading,vx,vy,omega,hit_obstacle,hit_boundary,hit_robot,fired,fire_target,fire_blocked"
        )?;
        for f in &self.frames {
            for (i, r) in f.robots.iter().enumerate() {
                let fire = f.fires.iter().find(|e| e.shooter == RobotId(i));
                let (fired, target, blocked) = match fire {
                    Some(e) => (
                        1,
                        e.target.map(|t| t.0 as i64).unwrap_or(-1),
                        match e.blocked_by {
                            Blocker::None => "none",
                            Blocker::Obstacle => "obstacle",
                            Blocker::Ally => "ally",
                        },
                    ),
                    None => (0, -1, "none"),
                };
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    f.frame,
                    i,
                    match self.teams[i] {
                        Team::Ally => "ally",
                        Team::Enemy => "enemy",
                    },
                    r.pos_x,
                    r.pos_y,
                    r.heading,
                    r.action.vx,
                    r.action.vy,
                    r.action.omega,
                    r.flags.obstacle as u8,
                    r.flags.boundary as u8,
                    r.flags.robot as u8,
                    fired,
                    target,
                    blocked,
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("csv is utf8")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("not a replay file")]
    BadMagic,
    #[error("unsupported replay version {0}")]
    BadVersion(u32),
    #[error("corrupt replay: {0}")]
    Corrupt(String),
    #[error("config error: {0}")]
    Config(#[from] crate::config::ConfigError),
    #[error("spawn error: {0}")]
    Spawn(#[from] SpawnError),
    #[error("re-simulation diverged at robot {robot} ({axis})")]
    Diverged { robot: usize, axis: &'static str },
}

const REPLAY_MAGIC: &[u8; 4] = b"LTRP";
const REPLAY_VERSION: u32 = 1;

/// Compact binary replay: the world config plus every action, with the final
/// poses stored for divergence checking on re-simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub config: WorldConfig,
    /// actions[frame][robot]
    pub actions: Vec<Vec<Action>>,
    pub final_poses: Vec<[f32; 3]>,
}

impl Replay {
    pub fn record(config: &WorldConfig, log: &EpisodeLog, final_world: &WorldState) -> Self {
        Replay {
            config: config.clone(),
            actions: log
                .frames
                .iter()
                .map(|f| f.robots.iter().map(|r| r.action).collect())
                .collect(),
            final_poses: final_world
                .robots
                .iter()
                .map(|r| [r.pos.x, r.pos.y, r.heading])
                .collect(),
        }
    }

    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(REPLAY_MAGIC)?;
        w.write_all(&REPLAY_VERSION.to_le_bytes())?;
        let cfg = self.config.to_toml_string();
        w.write_all(&(cfg.len() as u32).to_le_bytes())?;
        w.write_all(cfg.as_bytes())?;
        let n_frames = self.actions.len() as u32;
        let n_robots = self.actions.first().map(|a| a.len()).unwrap_or(0) as u32;
        w.write_all(&n_frames.to_le_bytes())?;
        w.write_all(&n_robots.to_le_bytes())?;
        for frame in &self.actions {
            for a in frame {
                for v in a.as_array() {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
        }
        for p in &self.final_poses {
            for v in p {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self, ReplayError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != REPLAY_MAGIC {
            return Err(ReplayError::BadMagic);
        }
        let version = read_u32(&mut r)?;
        if version != REPLAY_VERSION {
            return Err(ReplayError::BadVersion(version));
        }
        let cfg_len = read_u32(&mut r)? as usize;
        let mut cfg_buf = vec![0u8; cfg_len];
        r.read_exact(&mut cfg_buf)?;
        let cfg_str =
            String::from_utf8(cfg_buf).map_err(|_| ReplayError::Corrupt("config not utf8".into()))?;
        let config = WorldConfig::from_toml_str(&cfg_str)?;
        let n_frames = read_u32(&mut r)? as usize;
        let n_robots = read_u32(&mut r)? as usize;
        let mut actions = Vec::with_capacity(n_frames);
        for _ in 0..n_frames {
            let mut frame = Vec::with_capacity(n_robots);
            for _ in 0..n_robots {
                frame.push(Action::new(read_f32(&mut r)?, read_f32(&mut r)?, read_f32(&mut r)?));
            }
            actions.push(frame);
        }
        let mut final_poses = Vec::with_capacity(n_robots);
        for _ in 0..n_robots {
            final_poses.push([read_f32(&mut r)?, read_f32(&mut r)?, read_f32(&mut r)?]);
        }
        Ok(Replay { config, actions, final_poses })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        self.write(&mut f)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ReplayError> {
        Self::read(std::fs::File::open(path)?)
    }

    /// Re-simulate the recorded actions and verify the final poses match
    /// bit for bit.
    pub fn resimulate(&self) -> Result<(EpisodeLog, WorldState), ReplayError> {
        let mut world = spawn_world(&self.config)?;
        let teams: Vec<Team> = world.robots.iter().map(|r| r.team).collect();
        let mut log = EpisodeLog { frames: Vec::with_capacity(self.actions.len()), teams };
        for acts in &self.actions {
            if acts.len() != world.robots.len() {
                return Err(ReplayError::Corrupt("robot count mismatch".into()));
            }
            let (next, flags) = step(&world, acts, &self.config);
            let fires: Vec<FireEvent> = next
                .allies()
                .filter_map(|id| crate::fire::check_fire(&next, id, &self.config))
                .collect();
            log.frames.push(FrameRecord {
                frame: next.frame - 1,
                robots: next
                    .robots
                    .iter()
                    .zip(acts)
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
        for (i, (r, exp)) in world.robots.iter().zip(&self.final_poses).enumerate() {
            if r.pos.x.to_bits() != exp[0].to_bits() {
                return Err(ReplayError::Diverged { robot: i, axis: "x" });
            }
            if r.pos.y.to_bits() != exp[1].to_bits() {
                return Err(ReplayError::Diverged { robot: i, axis: "y" });
            }
            if r.heading.to_bits() != exp[2].to_bits() {
                return Err(ReplayError::Diverged { robot: i, axis: "heading" });
            }
        }
        Ok((log, world))
    }
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f32<R: Read>(r: &mut R) -> io::Result<f32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(f32::from_le_bytes(b))
}
