//! Event-driven boundary-control behaviors.
//!
//! Four controllers share one state record and one configuration:
//!
//! * RVB Fencing — on every range received while outside the circle, compare
//!   the last two range increments, flip the rotation direction if the
//!   excursion is getting worse, and turn by a fixed increment.
//! * RVB Milling — correct the heading by `D k (r - R0)` whenever the vehicle
//!   is inside-and-approaching or outside-and-receding, plus an optional
//!   constant-rotation term applied on a heading timer.
//! * HEB Fencing — regress range rates against headings to estimate the
//!   beacon bearing; when outside the boundary, command `theta + 180 deg`.
//! * HEB Milling — command the path tangent at the estimated bearing plus a
//!   proportional radial correction.
//!
//! Controllers are pure state machines over delivered measurements: replaying
//! an identical event stream reproduces the command stream bit-exactly.

mod estimator;
mod heb;
mod rvb;

pub use estimator::{estimate_theta, ThetaEstimate, CONDITIONING_THRESHOLD};
pub use heb::{heb_fence_on_range, heb_mill_on_range};
pub use rvb::{rvb_fence_on_range, rvb_mill_heading_tick, rvb_mill_on_range};

use crate::angles::wrap_angle;
use crate::channel::RangeSample;
use crate::shapes::{RotationDir, ShapeSpec};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BehaviorError {
    #[error("RVB behaviors require a circular boundary")]
    RvbNeedsCircle,
    #[error("estimator window length must be at least 2 for HEB behaviors, got {0}")]
    WindowTooShort(usize),
    #[error("invalid behavior parameter {field}: {value}")]
    Invalid { field: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorMode {
    RvbFence,
    RvbMill,
    HebFence,
    HebMill,
}

/// What a fencing controller does while inside the boundary. The default
/// freezes the current heading on every in-boundary range event, so any
/// rotation in a log is attributable to the fencing rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InBoundary {
    HoldHeading,
    KeepCommand,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorConfig {
    pub mode: BehaviorMode,
    pub shape: ShapeSpec,
    pub direction: RotationDir,
    /// Proportional gain, degrees of heading per meter of radial error.
    pub k: f64,
    /// Constant-rotation gain, degrees per second.
    pub k_rate: f64,
    /// Exploratory rotation increment, degrees.
    pub delta_psi: f64,
    /// Estimator FIFO capacity (sample count).
    pub window_len: usize,
    /// Optional age purge for estimator samples, seconds.
    pub window_max_age: Option<f64>,
    /// Smallest fitted speed a bearing estimate may carry and still steer
    /// the vehicle, m/s. On the path the radial speed vanishes and the
    /// regression amplitude collapses toward zero; below this floor the
    /// bearing is fitted to noise and the controller coasts instead.
    pub min_fit_speed: f64,
    /// Period of the heading timer, s.
    pub heading_update_dt: f64,
    /// Cruise surge force, N.
    pub fx: f64,
    pub in_boundary: InBoundary,
}

impl BehaviorConfig {
    pub fn validate(&self) -> Result<(), BehaviorError> {
        use BehaviorMode::*;
        if matches!(self.mode, RvbFence | RvbMill) && !self.shape.is_circle() {
            return Err(BehaviorError::RvbNeedsCircle);
        }
        if matches!(self.mode, HebFence | HebMill) && self.window_len < 2 {
            return Err(BehaviorError::WindowTooShort(self.window_len));
        }
        let needs_delta_psi = !matches!(self.mode, RvbMill);
        let checks = [
            ("k", self.k, self.k >= 0.0),
            ("k_rate", self.k_rate, self.k_rate >= 0.0),
            (
                "delta_psi",
                self.delta_psi,
                !needs_delta_psi || self.delta_psi > 0.0,
            ),
            (
                "heading_update_dt",
                self.heading_update_dt,
                self.heading_update_dt > 0.0,
            ),
            ("fx", self.fx, self.fx >= 0.0),
            (
                "min_fit_speed",
                self.min_fit_speed,
                self.min_fit_speed >= 0.0,
            ),
        ];
        for (field, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(BehaviorError::Invalid { field, value });
            }
        }
        Ok(())
    }

    /// Radius of the circular boundary; RVB-only call sites, guarded by
    /// `validate`.
    pub(crate) fn circle_radius(&self) -> f64 {
        self.shape
            .circle_radius()
            .expect("RVB behaviors require a circular boundary")
    }
}

/// One estimator window entry: reception time plus the `(u_r, psi)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSample {
    pub t: f64,
    pub u_r: f64,
    pub psi: f64,
}

/// Per-agent controller memory.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorState {
    /// Last three delivered ranges, oldest first.
    pub range_history: VecDeque<f64>,
    /// Current RVB exploration direction, +-1.
    pub rotation_dir: f64,
    /// FIFO of `(u_r, psi)` measurements for the bearing regression.
    pub window: VecDeque<WindowSample>,
    /// Last commanded heading, radians.
    pub psi_cmd: f64,
    /// Most recent valid bearing estimate.
    pub last_valid_theta: Option<f64>,
    /// Most recent delivered range.
    pub latest_range: Option<f64>,
}

impl BehaviorState {
    pub fn new(initial_psi: f64, direction: RotationDir) -> Self {
        Self {
            range_history: VecDeque::with_capacity(3),
            rotation_dir: direction.sign(),
            window: VecDeque::new(),
            psi_cmd: wrap_angle(initial_psi),
            last_valid_theta: None,
            latest_range: None,
        }
    }

    pub(crate) fn record_range(&mut self, r: f64) {
        if self.range_history.len() == 3 {
            self.range_history.pop_front();
        }
        self.range_history.push_back(r);
        self.latest_range = Some(r);
    }

    pub(crate) fn push_window(&mut self, cfg: &BehaviorConfig, t: f64, u_r: f64, psi: f64) {
        self.window.push_back(WindowSample { t, u_r, psi });
        while self.window.len() > cfg.window_len {
            self.window.pop_front();
        }
        if let Some(max_age) = cfg.window_max_age {
            while self
                .window
                .front()
                .is_some_and(|s| t - s.t > max_age)
            {
                self.window.pop_front();
            }
        }
    }

    pub(crate) fn estimate(&self) -> ThetaEstimate {
        estimate_theta(self.window.iter().map(|s| (s.u_r, s.psi)))
    }
}

/// An absolute heading command, radians in (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Command {
    pub psi_cmd: f64,
}

/// Fencing behavior while inside the boundary. Holding the heading emits a
/// command only when it actually changes the commanded value, so an agent
/// cruising straight generates no event chatter.
pub(crate) fn in_boundary_command(
    state: &mut BehaviorState,
    cfg: &BehaviorConfig,
    psi_now: f64,
) -> Option<Command> {
    match cfg.in_boundary {
        InBoundary::HoldHeading => {
            let cmd = wrap_angle(psi_now);
            if cmd == state.psi_cmd {
                return None;
            }
            state.psi_cmd = cmd;
            Some(Command { psi_cmd: cmd })
        }
        InBoundary::KeepCommand => None,
    }
}

/// Convenience wrapper binding a configuration to its state and dispatching
/// events by mode. The free functions above remain usable directly.
#[derive(Debug, Clone, PartialEq)]
pub struct Controller {
    pub cfg: BehaviorConfig,
    pub state: BehaviorState,
}

impl Controller {
    pub fn new(cfg: BehaviorConfig, initial_psi: f64) -> Self {
        let state = BehaviorState::new(initial_psi, cfg.direction);
        Self { cfg, state }
    }

    /// Handle a delivered range. `psi_now` is the current heading;
    /// `psi_for_rate` is the heading at the instant the sample's range rate
    /// refers to (pass `psi_now` when no attitude history is available).
    pub fn on_range(
        &mut self,
        sample: &RangeSample,
        psi_now: f64,
        psi_for_rate: f64,
    ) -> Option<Command> {
        match self.cfg.mode {
            BehaviorMode::RvbFence => rvb_fence_on_range(&mut self.state, &self.cfg, sample, psi_now),
            BehaviorMode::RvbMill => rvb_mill_on_range(&mut self.state, &self.cfg, sample, psi_now),
            BehaviorMode::HebFence => {
                heb_fence_on_range(&mut self.state, &self.cfg, sample, psi_now, psi_for_rate)
            }
            BehaviorMode::HebMill => {
                heb_mill_on_range(&mut self.state, &self.cfg, sample, psi_now, psi_for_rate)
            }
        }
    }

    /// Rate-only delivery (Doppler broadcast): refreshes the estimator window.
    pub fn on_rate(&mut self, t: f64, u_r: f64, psi_now: f64) {
        if matches!(self.cfg.mode, BehaviorMode::HebFence | BehaviorMode::HebMill) {
            self.state.push_window(&self.cfg, t, u_r, psi_now);
        }
    }

    /// Periodic heading timer, fired every `heading_update_dt`.
    pub fn on_heading_tick(&mut self) -> Option<Command> {
        if self.cfg.mode != BehaviorMode::RvbMill || self.cfg.k_rate <= 0.0 {
            return None;
        }
        let r_latest = self.state.latest_range?;
        rvb_mill_heading_tick(&mut self.state, &self.cfg, r_latest)
    }
}
