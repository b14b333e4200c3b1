//! Heading-estimation-based controllers. Each range event refreshes the
//! `(u_r, psi)` window, re-estimates the beacon bearing, and commands an
//! absolute heading from the boundary geometry at that bearing.
//!
//! `psi_for_rate` is the heading paired with the delivered range rate: the
//! vehicle's own heading at the instant the rate refers to (`t_rate`), read
//! from its attitude log. Pairing against the heading at reception instead
//! would skew the regression by the full turn executed during the delivery
//! latency.

use super::rvb::exploratory_rotation;
use super::{in_boundary_command, BehaviorConfig, BehaviorState, Command};
use crate::angles::wrap_angle;
use crate::channel::RangeSample;
use std::f64::consts::PI;

/// Fencing on an arbitrary star-shaped boundary: outside, command
/// `theta + 180 deg` to head straight back at the beacon.
///
/// When the regression is unusable (rank-deficient after straight-line
/// motion, or amplitude below the trust floor) there is no bearing to test
/// the boundary with or to steer by. The range alone still bounds the
/// ambiguity: below the inscribed radius the vehicle is inside no matter
/// the bearing, so it holds; above it, one RVB-style exploratory rotation
/// both probes the boundary and re-excites the estimator. On circles the
/// inscribed radius is the boundary itself, so the probe fires exactly when
/// outside.
pub fn heb_fence_on_range(
    state: &mut BehaviorState,
    cfg: &BehaviorConfig,
    sample: &RangeSample,
    psi_now: f64,
    psi_for_rate: f64,
) -> Option<Command> {
    if let Some(u_r) = sample.u_r {
        state.push_window(cfg, sample.t_rate.unwrap_or(sample.t_recv), u_r, psi_for_rate);
    }
    state.record_range(sample.r);
    let est = state.estimate();
    let usable = est.valid && est.amplitude >= cfg.min_fit_speed;
    if usable {
        state.last_valid_theta = Some(est.theta);
        if sample.r > cfg.shape.radius_at(est.theta) {
            let cmd = wrap_angle(est.theta + PI);
            state.psi_cmd = cmd;
            Some(Command { psi_cmd: cmd })
        } else {
            in_boundary_command(state, cfg, psi_now)
        }
    } else if sample.r > cfg.shape.min_radius() {
        Some(exploratory_rotation(state, cfg, psi_now))
    } else {
        in_boundary_command(state, cfg, psi_now)
    }
}

/// Milling on an arbitrary star-shaped path: command the path tangent at the
/// estimated bearing plus a proportional correction on the radial error.
///
/// While the window is still filling the controller coasts on its previous
/// command. A full window that stays rank-deficient means the vehicle has
/// been running dead straight since startup and would coast forever, so one
/// exploratory rotation is applied to excite the regression.
pub fn heb_mill_on_range(
    state: &mut BehaviorState,
    cfg: &BehaviorConfig,
    sample: &RangeSample,
    psi_now: f64,
    psi_for_rate: f64,
) -> Option<Command> {
    if let Some(u_r) = sample.u_r {
        state.push_window(cfg, sample.t_rate.unwrap_or(sample.t_recv), u_r, psi_for_rate);
    }
    state.record_range(sample.r);
    let est = state.estimate();
    let usable = est.valid && est.amplitude >= cfg.min_fit_speed;
    if usable {
        state.last_valid_theta = Some(est.theta);
        let r_d = cfg.shape.radius_at(est.theta);
        let psi_d = cfg.shape.desired_heading_at(est.theta, cfg.direction);
        // The proportional term saturates at a quarter turn: past that the
        // command is purely radial (straight at the beacon when far outside,
        // straight away from it when far inside). Letting it grow further
        // would wrap, planting spurious equilibria on inner circles where
        // k (r - R_d) passes -360 deg.
        let correction = (cfg.direction.sign() * cfg.k * (sample.r - r_d))
            .clamp(-90.0, 90.0)
            .to_radians();
        let cmd = wrap_angle(psi_d + correction);
        state.psi_cmd = cmd;
        Some(Command { psi_cmd: cmd })
    } else if !est.valid && state.window.len() >= cfg.window_len {
        let cmd = wrap_angle(psi_now + (cfg.delta_psi * cfg.direction.sign()).to_radians());
        state.psi_cmd = cmd;
        Some(Command { psi_cmd: cmd })
    } else {
        // Window still filling, or the fit amplitude is below the trust
        // floor: coast on the previous command.
        None
    }
}
