//! Scenario configuration: the on-disk TOML schema (`ScenarioFile`, kept
//! verbatim as the run snapshot) and its validated, unit-converted runtime
//! form (`ScenarioConfig`). Angles are degrees in files and radians inside.

use crate::behaviors::{BehaviorConfig, BehaviorError, BehaviorMode, InBoundary};
use crate::channel::{ChannelConfig, ChannelError, RateSource, TimingMode};
use crate::dynamics::{DynamicsError, DynamicsParams};
use crate::geom::Vec2;
use crate::shapes::{RotationDir, ShapeError, ShapeSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("shape: {0}")]
    Shape(#[from] ShapeError),
    #[error("dynamics: {0}")]
    Dynamics(#[from] DynamicsError),
    #[error("channel: {0}")]
    Channel(#[from] ChannelError),
    #[error("behavior: {0}")]
    Behavior(#[from] BehaviorError),
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// On-disk scenario description. This struct round-trips through TOML and is
/// embedded unmodified in run manifests so a run can be replayed later.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: ScenarioSection,
    pub shape: ShapeSection,
    #[serde(default)]
    pub behavior: BehaviorSection,
    #[serde(default)]
    pub dynamics: DynamicsSection,
    #[serde(default)]
    pub channel: ChannelSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(default = "d_one_usize")]
    pub n_agents: usize,
    /// Simulated time, s.
    pub duration: f64,
    #[serde(default = "d_dt")]
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    /// Drop this initial span from metric computation, s.
    #[serde(default)]
    pub metrics_skip: f64,
    /// Ambient flow vector, m/s.
    #[serde(default)]
    pub flow: [f64; 2],
    /// Explicit starts as `[x_m, y_m, psi_deg]`; omitted = seeded random
    /// poses inside the boundary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_poses: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSection {
    pub kind: ShapeKind,
    /// Circle radius, or star vertex distance, m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Square side length, m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<f64>,
    /// Star concave-point coordinate (point at `(concave, concave)`), m.
    /// Defaults to `radius / 3`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concave: Option<f64>,
    /// Polygon vertices, m; must be star-shaped around the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Circle,
    Square,
    Star,
    Polygon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorSection {
    pub mode: BehaviorMode,
    pub direction: RotationDir,
    /// Proportional gain, deg/m.
    pub k: f64,
    /// Constant-rotation gain, deg/s.
    pub k_rate: f64,
    /// Exploratory rotation increment, deg.
    pub delta_psi: f64,
    pub window_len: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_max_age: Option<f64>,
    /// Bearing-fit trust floor, m/s (see behaviors docs).
    #[serde(default = "d_min_fit_speed")]
    pub min_fit_speed: f64,
    pub heading_update_dt: f64,
    /// Cruise surge force, N.
    pub fx: f64,
    pub in_boundary: InBoundary,
}

impl Default for BehaviorSection {
    fn default() -> Self {
        Self {
            mode: BehaviorMode::HebFence,
            direction: RotationDir::Cw,
            k: 20.0,
            k_rate: 0.0,
            delta_psi: 20.0,
            window_len: 5,
            window_max_age: None,
            min_fit_speed: d_min_fit_speed(),
            heading_update_dt: 1.0,
            fx: 0.5,
            in_boundary: InBoundary::HoldHeading,
        }
    }
}

fn d_min_fit_speed() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    pub xu: f64,
    pub xuu: f64,
    pub yv: f64,
    pub yvv: f64,
    /// Total mass including added mass, kg.
    pub mass: f64,
    /// Heading slew rate, deg/s.
    pub psi_rate_max: f64,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        Self {
            xu: 0.1,
            xuu: 4.04,
            yv: 0.1,
            yvv: 20.0,
            mass: 6.0,
            psi_rate_max: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub slot_time: f64,
    pub loss_prob: f64,
    pub rate_source: RateSource,
    pub range_noise_std: f64,
    pub doppler_noise_std: f64,
    pub ranging_increment: f64,
    pub timing_mode: TimingMode,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            slot_time: 1.0,
            loss_prob: 0.0,
            rate_source: RateSource::Consecutive,
            range_noise_std: 0.0,
            doppler_noise_std: 0.0,
            ranging_increment: 0.0,
            timing_mode: TimingMode::Simple,
        }
    }
}

fn d_one_usize() -> usize {
    1
}
fn d_dt() -> f64 {
    0.05
}

impl ScenarioFile {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(s)?)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("scenario file serializes")
    }

    pub fn build_shape(&self) -> Result<ShapeSpec, ConfigError> {
        let s = &self.shape;
        let need = |opt: Option<f64>, field: &str| {
            opt.ok_or_else(|| invalid(field, format!("required for shape kind `{:?}`", s.kind)))
        };
        Ok(match s.kind {
            ShapeKind::Circle => ShapeSpec::circle(need(s.radius, "shape.radius")?)?,
            ShapeKind::Square => ShapeSpec::square(need(s.side, "shape.side")?)?,
            ShapeKind::Star => {
                let radius = need(s.radius, "shape.radius")?;
                ShapeSpec::star(radius, s.concave.unwrap_or(radius / 3.0))?
            }
            ShapeKind::Polygon => {
                let verts = s
                    .vertices
                    .as_ref()
                    .ok_or_else(|| invalid("shape.vertices", "required for shape kind `polygon`"))?
                    .iter()
                    .map(|&[x, y]| Vec2::new(x, y))
                    .collect();
                ShapeSpec::polygon(verts)?
            }
        })
    }

    /// Validate and convert into the runtime configuration.
    pub fn resolve(&self) -> Result<ScenarioConfig, ConfigError> {
        let sc = &self.scenario;
        if sc.n_agents < 1 {
            return Err(invalid("scenario.n_agents", "must be at least 1"));
        }
        if !(sc.duration > 0.0) || !sc.duration.is_finite() {
            return Err(invalid("scenario.duration", "must be positive"));
        }
        if !(sc.dt > 0.0) || !sc.dt.is_finite() {
            return Err(invalid("scenario.dt", "must be positive"));
        }
        if !(0.0..sc.duration).contains(&sc.metrics_skip) {
            return Err(invalid("scenario.metrics_skip", "must be in [0, duration)"));
        }
        if !sc.flow.iter().all(|v| v.is_finite()) {
            return Err(invalid("scenario.flow", "must be finite"));
        }

        let shape = self.build_shape()?;

        let b = &self.behavior;
        let behavior = BehaviorConfig {
            mode: b.mode,
            shape: shape.clone(),
            direction: b.direction,
            k: b.k,
            k_rate: b.k_rate,
            delta_psi: b.delta_psi,
            window_len: b.window_len,
            window_max_age: b.window_max_age,
            min_fit_speed: b.min_fit_speed,
            heading_update_dt: b.heading_update_dt,
            fx: b.fx,
            in_boundary: b.in_boundary,
        };
        behavior.validate()?;

        let d = &self.dynamics;
        let dynamics = DynamicsParams {
            xu: d.xu,
            xuu: d.xuu,
            yv: d.yv,
            yvv: d.yvv,
            mass: d.mass,
            psi_rate_max: d.psi_rate_max.to_radians(),
            dt: sc.dt,
        };
        dynamics.validate()?;

        let c = &self.channel;
        let channel = ChannelConfig {
            slot_time: c.slot_time,
            loss_prob: c.loss_prob,
            rate_source: c.rate_source,
            range_noise_std: c.range_noise_std,
            doppler_noise_std: c.doppler_noise_std,
            ranging_increment: c.ranging_increment,
            timing_mode: c.timing_mode,
            seed: sc.seed,
        };
        channel.validate()?;

        let steps = (sc.duration / sc.dt).round() as u64;
        if steps == 0 {
            return Err(invalid("scenario.duration", "shorter than one step"));
        }
        let slot_steps = exact_multiple(c.slot_time, sc.dt)
            .ok_or_else(|| invalid("channel.slot_time", "must be a multiple of scenario.dt"))?;
        let tick_steps = exact_multiple(b.heading_update_dt, sc.dt).ok_or_else(|| {
            invalid(
                "behavior.heading_update_dt",
                "must be a multiple of scenario.dt",
            )
        })?;

        let initial_poses = match &sc.initial_poses {
            None => None,
            Some(poses) => {
                if poses.len() != sc.n_agents {
                    return Err(invalid(
                        "scenario.initial_poses",
                        format!("expected {} poses, got {}", sc.n_agents, poses.len()),
                    ));
                }
                if poses.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(invalid("scenario.initial_poses", "must be finite"));
                }
                Some(
                    poses
                        .iter()
                        .map(|&[x, y, psi_deg]| (x, y, psi_deg.to_radians()))
                        .collect(),
                )
            }
        };

        Ok(ScenarioConfig {
            file: self.clone(),
            n_agents: sc.n_agents,
            duration: sc.duration,
            dt: sc.dt,
            seed: sc.seed,
            metrics_skip: sc.metrics_skip,
            flow: Vec2::new(sc.flow[0], sc.flow[1]),
            initial_poses,
            shape,
            behavior,
            dynamics,
            channel,
            steps,
            slot_steps,
            tick_steps,
        })
    }
}

/// `big / small` as an exact positive integer, tolerating float rounding.
fn exact_multiple(big: f64, small: f64) -> Option<u64> {
    let ratio = big / small;
    let n = ratio.round();
    if n >= 1.0 && (ratio - n).abs() < 1e-9 * n {
        Some(n as u64)
    } else {
        None
    }
}

/// Validated runtime configuration. `file` preserves the exact source
/// description for manifests and replay.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub file: ScenarioFile,
    pub n_agents: usize,
    pub duration: f64,
    pub dt: f64,
    pub seed: u64,
    pub metrics_skip: f64,
    pub flow: Vec2,
    /// Radians after conversion.
    pub initial_poses: Option<Vec<(f64, f64, f64)>>,
    pub shape: ShapeSpec,
    /// Template applied to every agent.
    pub behavior: BehaviorConfig,
    pub dynamics: DynamicsParams,
    pub channel: ChannelConfig,
    pub steps: u64,
    pub slot_steps: u64,
    pub tick_steps: u64,
}
