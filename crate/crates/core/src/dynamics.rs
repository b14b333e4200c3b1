//! Fixed-step planar rigid-body integration of one under-actuated AUV.
//!
//! The vehicle actuates surge force and heading only. Heading slews toward
//! the commanded value at a constant rate and stops exactly on target; body
//! velocities integrate surge/sway drag (linear plus quadratic); position
//! rotates body velocities into the world frame and adds ambient flow as
//! pure kinematic advection.

use crate::angles::wrap_angle;
use crate::geom::Vec2;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("invalid dynamics parameter {field}: {value}")]
    Invalid { field: &'static str, value: f64 },
}

/// Hydrodynamic and integration parameters. Drag coefficients follow the
/// surge/sway split: linear `xu`/`yv` and quadratic `xuu`/`yvv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsParams {
    pub xu: f64,
    pub xuu: f64,
    pub yv: f64,
    pub yvv: f64,
    /// Total mass including added mass, kg.
    pub mass: f64,
    /// Constant heading slew rate, rad/s.
    pub psi_rate_max: f64,
    /// Integration step, s.
    pub dt: f64,
}

impl DynamicsParams {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let checks = [
            ("mass", self.mass, self.mass > 0.0),
            ("dt", self.dt, self.dt > 0.0),
            ("psi_rate_max", self.psi_rate_max, self.psi_rate_max > 0.0),
            ("xu", self.xu, self.xu >= 0.0),
            ("xuu", self.xuu, self.xuu >= 0.0),
            ("yv", self.yv, self.yv >= 0.0),
            ("yvv", self.yvv, self.yvv >= 0.0),
        ];
        for (field, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(DynamicsError::Invalid { field, value });
            }
        }
        Ok(())
    }
}

/// Full kinematic state of one vehicle. Positions are world-frame meters
/// with the beacon at the origin; `u`/`v` are body-frame surge/sway speeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
    pub psi: f64,
    pub psi_cmd: f64,
    pub fx: f64,
}

impl AgentState {
    pub fn at_rest(x: f64, y: f64, psi: f64, fx: f64) -> Self {
        let psi = wrap_angle(psi);
        Self {
            x,
            y,
            u: 0.0,
            v: 0.0,
            psi,
            psi_cmd: psi,
            fx,
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// World-frame velocity of the hull (body velocities rotated by psi),
    /// excluding ambient flow.
    pub fn world_velocity(&self) -> Vec2 {
        let (s, c) = self.psi.sin_cos();
        Vec2::new(self.u * c + self.v * s, self.u * s - self.v * c)
    }
}

/// Advance one step. Pure function: identical inputs give bit-identical
/// outputs.
pub fn step(state: &AgentState, p: &DynamicsParams, flow: Vec2) -> AgentState {
    // Heading: constant-rate slew along the shorter arc, exact stop on target.
    let diff = wrap_angle(state.psi_cmd - state.psi);
    let max_step = p.psi_rate_max * p.dt;
    let psi = if diff.abs() <= max_step {
        state.psi_cmd
    } else {
        wrap_angle(state.psi + max_step.copysign(diff))
    };

    // Body forces from the previous velocities.
    let fu = state.fx - p.xuu * state.u * state.u.abs() - p.xu * state.u;
    let fv = -p.yvv * state.v * state.v.abs() - p.yv * state.v;
    let u = state.u + fu / p.mass * p.dt;
    let v = state.v + fv / p.mass * p.dt;

    // World-frame translation with the updated velocities and heading, plus
    // ambient flow advection.
    let (s, c) = psi.sin_cos();
    let x = state.x + (u * c + v * s) * p.dt + flow.x * p.dt;
    let y = state.y + (u * s - v * c) * p.dt + flow.y * p.dt;

    AgentState {
        x,
        y,
        u,
        v,
        psi,
        psi_cmd: state.psi_cmd,
        fx: state.fx,
    }
}

/// Nonnegative root of `xuu u^2 + xu u = fx`: the steady surge speed the
/// integrator must converge to under constant thrust.
pub fn terminal_surge_speed(p: &DynamicsParams, fx: f64) -> f64 {
    debug_assert!(fx >= 0.0);
    if fx <= 0.0 {
        return 0.0;
    }
    if p.xuu == 0.0 {
        if p.xu == 0.0 {
            return f64::INFINITY;
        }
        return fx / p.xu;
    }
    (-p.xu + (p.xu * p.xu + 4.0 * p.xuu * fx).sqrt()) / (2.0 * p.xuu)
}
