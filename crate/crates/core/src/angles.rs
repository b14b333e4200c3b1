//! Angle helpers. All internal angles are radians; every angle that crosses a
//! public API boundary is normalized to (-pi, pi].

use std::f64::consts::{PI, TAU};

/// Normalize an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

/// Shortest signed difference `a - b`, in (-pi, pi].
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b)
}
