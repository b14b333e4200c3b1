//! Range-variation-based controllers. These use only the stream of delivered
//! ranges, so they are restricted to circular boundaries centered on the
//! beacon.

use super::{in_boundary_command, BehaviorConfig, BehaviorState, Command};
use crate::angles::wrap_angle;
use crate::channel::RangeSample;

/// One exploratory fencing rotation: flip the rotation direction when the
/// last range increment exceeds the previous one (the turn made things
/// worse), then rotate by the configured increment. With fewer than three
/// recorded ranges the rotation is applied without the comparison.
pub(super) fn exploratory_rotation(
    state: &mut BehaviorState,
    cfg: &BehaviorConfig,
    psi_now: f64,
) -> Command {
    let h = &state.range_history;
    if h.len() >= 3 {
        let dr_i = h[h.len() - 1] - h[h.len() - 2];
        let dr_prev = h[h.len() - 2] - h[h.len() - 3];
        if dr_i > dr_prev {
            state.rotation_dir = -state.rotation_dir;
        }
    }
    let cmd = wrap_angle(psi_now + (cfg.delta_psi * state.rotation_dir).to_radians());
    state.psi_cmd = cmd;
    Command { psi_cmd: cmd }
}

/// Fencing on a circular boundary: act only while outside the circle.
pub fn rvb_fence_on_range(
    state: &mut BehaviorState,
    cfg: &BehaviorConfig,
    sample: &RangeSample,
    psi_now: f64,
) -> Option<Command> {
    state.record_range(sample.r);
    if sample.r > cfg.circle_radius() {
        Some(exploratory_rotation(state, cfg, psi_now))
    } else {
        in_boundary_command(state, cfg, psi_now)
    }
}

/// Milling on a circular path: correct the heading when inside-and-closing
/// or outside-and-receding; keep the current heading otherwise.
pub fn rvb_mill_on_range(
    state: &mut BehaviorState,
    cfg: &BehaviorConfig,
    sample: &RangeSample,
    psi_now: f64,
) -> Option<Command> {
    state.record_range(sample.r);
    let h = &state.range_history;
    if h.len() < 2 {
        return None;
    }
    let r0 = cfg.circle_radius();
    let r = sample.r;
    let dr = h[h.len() - 1] - h[h.len() - 2];
    let correcting = (r < r0 && dr < 0.0) || (r > r0 && dr > 0.0);
    if !correcting {
        return None;
    }
    let delta = (cfg.direction.sign() * cfg.k * (r - r0)).to_radians();
    let cmd = wrap_angle(psi_now + delta);
    state.psi_cmd = cmd;
    Some(Command { psi_cmd: cmd })
}

/// Constant-rotation term applied every `heading_update_dt` seconds:
/// increments the commanded heading by `D k_rate (R0 / r) dt` while at or
/// outside the path radius, never exceeding `D k_rate dt`.
pub fn rvb_mill_heading_tick(
    state: &mut BehaviorState,
    cfg: &BehaviorConfig,
    r_latest: f64,
) -> Option<Command> {
    if cfg.k_rate <= 0.0 {
        return None;
    }
    let r0 = cfg.circle_radius();
    if r_latest < r0 {
        return None;
    }
    let ratio = if r_latest > 0.0 {
        (r0 / r_latest).min(1.0)
    } else {
        1.0
    };
    let delta = (cfg.direction.sign() * cfg.k_rate * ratio * cfg.heading_update_dt).to_radians();
    let cmd = wrap_angle(state.psi_cmd + delta);
    state.psi_cmd = cmd;
    Some(Command { psi_cmd: cmd })
}
