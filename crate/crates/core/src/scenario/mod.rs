//! Deterministic fixed-step simulation engine binding dynamics, channel,
//! behaviors, and metrics.
//!
//! The clock is an integer step counter scaled by `dt`, so event scheduling
//! never drifts. Within one step the order is: dynamics advance and state
//! recording, then channel deliveries, then the heading timer — ties between
//! a delivery and a timer tick at the same instant always resolve
//! channel-first. A run is single-threaded and fully determined by its
//! configuration (batch callers may parallelize across runs).

mod config;
mod runlog;

pub use config::{ConfigError, ScenarioConfig, ScenarioFile, ShapeKind};
pub use runlog::RunLogError;

use crate::angles::wrap_angle;
use crate::behaviors::Controller;
use crate::channel::{Channel, ChannelConfig, Kinematics, RangeSample};
use crate::dynamics::{self, AgentState};
use crate::metrics::{report_for_run, MetricsReport, SettleSpec, Trajectory, TrajectorySample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// One emitted heading command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommandEvent {
    pub t: f64,
    pub psi_cmd: f64,
}

/// Everything a run produced, sufficient to replay it exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub version: String,
    pub config: ScenarioFile,
    pub trajectories: Vec<Trajectory>,
    pub samples: Vec<Vec<RangeSample>>,
    pub commands: Vec<Vec<CommandEvent>>,
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("log was produced by version {log} but this is {current}")]
    VersionMismatch { log: String, current: String },
    #[error("config in log no longer resolves: {0}")]
    Config(#[from] ConfigError),
    #[error("replay diverged: {0}")]
    Diverged(String),
}

/// Run a scenario to completion.
pub fn run(cfg: &ScenarioConfig) -> RunLog {
    let n = cfg.n_agents;
    let poses = cfg
        .initial_poses
        .clone()
        .unwrap_or_else(|| sample_poses(cfg));

    let mut agents: Vec<AgentState> = poses
        .iter()
        .map(|&(x, y, psi)| AgentState::at_rest(x, y, psi, cfg.behavior.fx))
        .collect();
    let mut controllers: Vec<Controller> = agents
        .iter()
        .map(|a| Controller::new(cfg.behavior.clone(), a.psi))
        .collect();
    let mut channel = Channel::new(
        ChannelConfig {
            seed: cfg.seed,
            ..cfg.channel.clone()
        },
        n,
    );

    let mut hist: Vec<Vec<AgentState>> = agents
        .iter()
        .map(|&a| {
            let mut v = Vec::with_capacity(cfg.steps as usize + 1);
            v.push(a);
            v
        })
        .collect();
    let mut samples_log: Vec<Vec<RangeSample>> = vec![Vec::new(); n];
    let mut commands_log: Vec<Vec<CommandEvent>> = vec![Vec::new(); n];

    for k in 1..=cfg.steps {
        for a in 0..n {
            agents[a] = dynamics::step(&agents[a], &cfg.dynamics, cfg.flow);
            hist[a].push(agents[a]);
        }

        if k % cfg.slot_steps == 0 {
            let slot_idx = k / cfg.slot_steps;
            let dt = cfg.dt;
            let flow = cfg.flow;
            let hist_ref = &hist;
            let probe = move |agent: usize, t: f64| -> Kinematics {
                let idx = (t / dt).round() as usize;
                let s = &hist_ref[agent][idx];
                let pos = s.position();
                let vel = s.world_velocity() + flow;
                let r = pos.norm();
                let radial_speed = if r > 0.0 { pos.dot(vel) / r } else { 0.0 };
                Kinematics { pos, radial_speed }
            };
            let out = channel.poll(slot_idx, &probe);
            for s in out.ranges {
                let id = s.agent_id;
                // Pair the delivered range rate with the vehicle's heading at
                // the instant the rate refers to (its own attitude log), not
                // the heading after the delivery latency.
                let psi_for_rate = s
                    .t_rate
                    .map(|tr| hist[id][(tr / cfg.dt).round() as usize].psi)
                    .unwrap_or(agents[id].psi);
                if let Some(cmd) = controllers[id].on_range(&s, agents[id].psi, psi_for_rate) {
                    agents[id].psi_cmd = cmd.psi_cmd;
                    commands_log[id].push(CommandEvent {
                        t: s.t_recv,
                        psi_cmd: cmd.psi_cmd,
                    });
                }
                samples_log[id].push(s);
            }
            for rs in out.rates {
                controllers[rs.agent_id].on_rate(rs.t, rs.u_r, agents[rs.agent_id].psi);
            }
        }

        if k % cfg.tick_steps == 0 {
            let t = k as f64 * cfg.dt;
            for a in 0..n {
                if let Some(cmd) = controllers[a].on_heading_tick() {
                    agents[a].psi_cmd = cmd.psi_cmd;
                    commands_log[a].push(CommandEvent {
                        t,
                        psi_cmd: cmd.psi_cmd,
                    });
                }
            }
        }
    }

    let trajectories = hist
        .into_iter()
        .enumerate()
        .map(|(agent_id, states)| Trajectory {
            agent_id,
            samples: states
                .into_iter()
                .enumerate()
                .map(|(i, s)| TrajectorySample {
                    t: i as f64 * cfg.dt,
                    x: s.x,
                    y: s.y,
                    r: s.x.hypot(s.y),
                    theta: s.y.atan2(s.x),
                    psi: s.psi,
                })
                .collect(),
        })
        .collect();

    RunLog {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.file.clone(),
        trajectories,
        samples: samples_log,
        commands: commands_log,
    }
}

/// Re-execute a log's config snapshot and verify the result matches the log
/// exactly. Returns the fresh log on success.
pub fn replay(log: &RunLog) -> Result<RunLog, ReplayError> {
    let current = env!("CARGO_PKG_VERSION");
    if log.version != current {
        return Err(ReplayError::VersionMismatch {
            log: log.version.clone(),
            current: current.to_string(),
        });
    }
    let cfg = log.config.resolve()?;
    let fresh = run(&cfg);
    diff_logs(log, &fresh)?;
    Ok(fresh)
}

fn diff_logs(a: &RunLog, b: &RunLog) -> Result<(), ReplayError> {
    let fail = |what: String| Err(ReplayError::Diverged(what));
    if a.config != b.config {
        return fail("config snapshot".into());
    }
    if a.trajectories.len() != b.trajectories.len() {
        return fail("agent count".into());
    }
    for (ta, tb) in a.trajectories.iter().zip(&b.trajectories) {
        if ta != tb {
            let where_ = ta
                .samples
                .iter()
                .zip(&tb.samples)
                .position(|(x, y)| x != y)
                .map(|i| format!("sample {i}"))
                .unwrap_or_else(|| "length".into());
            return fail(format!("trajectory of agent {} at {}", ta.agent_id, where_));
        }
    }
    for (id, (sa, sb)) in a.samples.iter().zip(&b.samples).enumerate() {
        if sa != sb {
            let i = sa.iter().zip(sb).position(|(x, y)| x != y);
            return fail(format!("range samples of agent {id} at {i:?}"));
        }
    }
    for (id, (ca, cb)) in a.commands.iter().zip(&b.commands).enumerate() {
        if ca != cb {
            let i = ca.iter().zip(cb).position(|(x, y)| x != y);
            return fail(format!("command events of agent {id} at {i:?}"));
        }
    }
    Ok(())
}

impl RunLog {
    /// Compute the metrics report, applying the configured transient skip.
    pub fn compute_report(&self) -> Result<MetricsReport, ConfigError> {
        let cfg = self.config.resolve()?;
        let trimmed: Vec<Trajectory> = self
            .trajectories
            .iter()
            .map(|t| t.skip_until(cfg.metrics_skip))
            .collect();
        Ok(report_for_run(&trimmed, &cfg.shape, &SettleSpec::default()))
    }

    /// Trajectories rebuilt from what the channel actually delivered: range
    /// from the sample, bearing looked up from the true trajectory at the
    /// measurement instant. Field-comparable rather than ground-truth.
    pub fn measured_trajectories(&self) -> Result<Vec<Trajectory>, ConfigError> {
        let cfg = self.config.resolve()?;
        Ok(self
            .samples
            .iter()
            .enumerate()
            .map(|(agent_id, samples)| Trajectory {
                agent_id,
                samples: samples
                    .iter()
                    .map(|s| {
                        let idx = (s.t_meas / cfg.dt).round() as usize;
                        let theta = self.trajectories[agent_id].samples[idx].theta;
                        let psi = self.trajectories[agent_id].samples[idx].psi;
                        TrajectorySample {
                            t: s.t_meas,
                            x: s.r * theta.cos(),
                            y: s.r * theta.sin(),
                            r: s.r,
                            theta,
                            psi,
                        }
                    })
                    .collect(),
            })
            .collect())
    }
}

/// Seeded uniform poses inside the boundary with uniform headings. Each agent
/// draws from its own stream, so fleet composition changes do not reshuffle
/// the others.
fn sample_poses(cfg: &ScenarioConfig) -> Vec<(f64, f64, f64)> {
    let r_max = cfg.shape.max_radius();
    (0..cfg.n_agents)
        .map(|a| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.seed ^ (a as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03),
            );
            loop {
                let x = rng.random_range(-r_max..r_max);
                let y = rng.random_range(-r_max..r_max);
                let r = x.hypot(y);
                let theta = y.atan2(x);
                if cfg.shape.contains(r, theta) {
                    let psi = wrap_angle(rng.random_range(-PI..PI));
                    return (x, y, psi);
                }
            }
        })
        .collect()
}
