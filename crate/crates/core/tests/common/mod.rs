//! Shared oracles for the integration suites. Everything here is computed
//! independently of the library implementation it checks.

use std::f64::consts::{FRAC_PI_2, PI};

/// Brute-force bearing search: minimize the residual of
/// `u_r = A cos(theta - psi)` over a uniform theta grid, solving the optimal
/// amplitude in closed form per grid point. Returns the best grid angle.
pub fn brute_force_theta(samples: &[(f64, f64)], grid: &ThetaGrid) -> f64 {
    let (mut suu, mut scu, mut ssu, mut scc, mut scs, mut sss) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for &(u_r, psi) in samples {
        let (s, c) = psi.sin_cos();
        suu += u_r * u_r;
        scu += c * u_r;
        ssu += s * u_r;
        scc += c * c;
        scs += c * s;
        sss += s * s;
    }
    let mut best = (f64::INFINITY, 0.0);
    for (theta, &(s, c)) in grid.angles().zip(&grid.sin_cos) {
        let denom = c * c * scc + 2.0 * c * s * scs + s * s * sss;
        if denom <= 0.0 {
            continue;
        }
        let num = c * scu + s * ssu;
        // Amplitude is a speed: A >= 0. A negative unconstrained optimum
        // means the best admissible fit at this theta is A = 0.
        let residual = if num > 0.0 {
            suu - num * num / denom
        } else {
            suu
        };
        if residual < best.0 {
            best = (residual, theta);
        }
    }
    best.1
}

/// Precomputed trig table for the brute-force grid (shared across cases).
pub struct ThetaGrid {
    pub step: f64,
    pub sin_cos: Vec<(f64, f64)>,
}

impl ThetaGrid {
    /// Grid over [-180, 180) degrees at `step_deg` resolution.
    pub fn new(step_deg: f64) -> Self {
        let step = step_deg.to_radians();
        let n = (2.0 * PI / step).round() as usize;
        let sin_cos = (0..n)
            .map(|i| (-PI + i as f64 * step).sin_cos())
            .collect();
        Self { step, sin_cos }
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        let step = self.step;
        (0..self.sin_cos.len()).map(move |i| -PI + i as f64 * step)
    }
}

/// Closed-form polar radius of the axis-aligned centered square, folding the
/// angle into one face.
pub fn square_radius_closed_form(side: f64, theta: f64) -> f64 {
    let a = wrap(theta);
    let local = a - FRAC_PI_2 * (a / FRAC_PI_2).round();
    side / (2.0 * local.cos())
}

/// True when `theta` is within `margin` radians of a square corner.
pub fn near_square_corner(theta: f64, margin: f64) -> bool {
    let a = wrap(theta);
    let local = a - FRAC_PI_2 * (a / FRAC_PI_2).round();
    (local.abs() - PI / 4.0).abs() < margin
}

/// Closed-form polar radius of the 8-segment isotoxal star with vertices at
/// `rv` on the axes and concave points at `(+-c, +-c)`: the per-octant sign
/// resolution of the two +- segment families.
pub fn star_radius_closed_form(rv: f64, c: f64, theta: f64) -> f64 {
    let (ct, st) = (theta.cos(), theta.sin());
    if ct.abs() >= st.abs() {
        rv * c / (c * ct.abs() + (rv - c) * st.abs())
    } else {
        rv * c / ((rv - c) * ct.abs() + c * st.abs())
    }
}

/// True when `theta` is within `margin` of a star vertex or concave corner
/// (multiples of 45 degrees).
pub fn near_star_corner(theta: f64, margin: f64) -> bool {
    let q = PI / 4.0;
    let local = theta - q * (theta / q).round();
    local.abs() < margin
}

pub fn wrap(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Shortest signed angular difference `a - b`.
pub fn wrap_diff(a: f64, b: f64) -> f64 {
    wrap(a - b)
}

/// Deterministic xorshift generator so oracle inputs never depend on crate
/// RNG choices.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
