//! Boundary and path geometry as polar shape functions.
//!
//! A shape is either a circle or a polygon that is star-shaped with respect
//! to the origin (every ray from the origin crosses the boundary exactly
//! once), so the boundary has a single-valued polar radius `R_d(theta)` and a
//! per-ray desired traversal heading `psi_d(theta)`.
//!
//! Polygons are evaluated by generic ray-segment intersection; the piecewise
//! closed forms for the square and the isotoxal star live in the test suite
//! as independent oracles.

use crate::angles::wrap_angle;
use crate::geom::Vec2;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Tolerance on the segment parameter when intersecting a ray with an edge.
/// Rays through a vertex register on both adjacent edges; the tie-break
/// below keeps the first edge in storage order.
const EDGE_PARAM_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ShapeError {
    #[error("circle radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon has zero signed area")]
    DegeneratePolygon,
    #[error("polygon is not star-shaped with respect to the origin (edge {edge})")]
    NotStarShaped { edge: usize },
    #[error("star concave distance must satisfy 0 < concave < vertex radius")]
    BadStarProportions,
}

/// Rotation direction label used throughout the controllers: `Cw` maps to
/// D = +1 and traverses a circle with desired heading `theta + 90 deg`,
/// `Ccw` maps to D = -1 (mirror).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationDir {
    Cw,
    Ccw,
}

impl RotationDir {
    pub fn sign(self) -> f64 {
        match self {
            RotationDir::Cw => 1.0,
            RotationDir::Ccw => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Circle { radius: f64 },
    /// Counter-clockwise vertex storage; origin strictly inside the kernel.
    Polygon { vertices: Vec<Vec2> },
}

/// A closed boundary/path around the beacon at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    kind: Kind,
}

impl ShapeSpec {
    pub fn circle(radius: f64) -> Result<Self, ShapeError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(ShapeError::NonPositiveRadius(radius));
        }
        Ok(Self {
            kind: Kind::Circle { radius },
        })
    }

    /// Axis-aligned square of side `side` centered on the origin.
    pub fn square(side: f64) -> Result<Self, ShapeError> {
        if !(side > 0.0) || !side.is_finite() {
            return Err(ShapeError::NonPositiveRadius(side));
        }
        let h = side / 2.0;
        Self::polygon(vec![
            Vec2::new(h, -h),
            Vec2::new(h, h),
            Vec2::new(-h, h),
            Vec2::new(-h, -h),
        ])
    }

    /// 8-segment isotoxal star: four vertices at `vertex_radius` on the axes,
    /// four concave points at `(+-concave, +-concave)`.
    pub fn star(vertex_radius: f64, concave: f64) -> Result<Self, ShapeError> {
        if !(concave > 0.0 && concave < vertex_radius) || !vertex_radius.is_finite() {
            return Err(ShapeError::BadStarProportions);
        }
        let r = vertex_radius;
        let c = concave;
        Self::polygon(vec![
            Vec2::new(r, 0.0),
            Vec2::new(c, c),
            Vec2::new(0.0, r),
            Vec2::new(-c, c),
            Vec2::new(-r, 0.0),
            Vec2::new(-c, -c),
            Vec2::new(0.0, -r),
            Vec2::new(c, -c),
        ])
    }

    /// General polygon, validated to be star-shaped with respect to the
    /// origin. Vertices may arrive in either winding; storage is normalized
    /// to counter-clockwise.
    pub fn polygon(mut vertices: Vec<Vec2>) -> Result<Self, ShapeError> {
        if vertices.len() < 3 {
            return Err(ShapeError::TooFewVertices(vertices.len()));
        }
        let area2: f64 = (0..vertices.len())
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % vertices.len()];
                a.cross(b)
            })
            .sum();
        if area2 == 0.0 || !area2.is_finite() {
            return Err(ShapeError::DegeneratePolygon);
        }
        if area2 < 0.0 {
            vertices.reverse();
        }
        // Origin in the kernel: strictly left of every (CCW) edge.
        for i in 0..vertices.len() {
            let a = vertices[i];
            let b = vertices[(i + 1) % vertices.len()];
            let e = b - a;
            let margin = e.cross(Vec2::ZERO - a);
            if margin <= 1e-9 * e.norm() * a.norm().max(1.0) {
                return Err(ShapeError::NotStarShaped { edge: i });
            }
        }
        Ok(Self {
            kind: Kind::Polygon { vertices },
        })
    }

    pub fn is_circle(&self) -> bool {
        matches!(self.kind, Kind::Circle { .. })
    }

    pub fn circle_radius(&self) -> Option<f64> {
        match self.kind {
            Kind::Circle { radius } => Some(radius),
            _ => None,
        }
    }

    pub fn vertices(&self) -> Option<&[Vec2]> {
        match &self.kind {
            Kind::Polygon { vertices } => Some(vertices),
            _ => None,
        }
    }

    /// Largest boundary distance from the origin.
    pub fn max_radius(&self) -> f64 {
        match &self.kind {
            Kind::Circle { radius } => *radius,
            Kind::Polygon { vertices } => vertices
                .iter()
                .map(|v| v.norm())
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Smallest boundary distance from the origin (inscribed radius). Any
    /// range below this is inside regardless of bearing.
    pub fn min_radius(&self) -> f64 {
        match &self.kind {
            Kind::Circle { radius } => *radius,
            Kind::Polygon { vertices } => (0..vertices.len())
                .map(|i| {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % vertices.len()];
                    let e = b - a;
                    let t = ((Vec2::ZERO - a).dot(e) / e.dot(e)).clamp(0.0, 1.0);
                    (a + e * t).norm()
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Polar boundary radius `R_d(theta)`.
    pub fn radius_at(&self, theta: f64) -> f64 {
        match &self.kind {
            Kind::Circle { radius } => *radius,
            Kind::Polygon { vertices } => ray_hit(vertices, theta).0,
        }
    }

    /// Desired traversal heading `psi_d(theta)` for rotation direction `dir`,
    /// normalized to (-pi, pi]. For a circle and `Cw` this is `theta + 90deg`;
    /// for polygons it is the heading of the edge the ray at `theta` hits,
    /// oriented along the traversal direction.
    pub fn desired_heading_at(&self, theta: f64, dir: RotationDir) -> f64 {
        match &self.kind {
            Kind::Circle { .. } => wrap_angle(theta + dir.sign() * FRAC_PI_2),
            Kind::Polygon { vertices } => {
                let (_, i) = ray_hit(vertices, theta);
                let a = vertices[i];
                let b = vertices[(i + 1) % vertices.len()];
                let e = b - a;
                let along = e.y.atan2(e.x);
                match dir {
                    RotationDir::Cw => wrap_angle(along),
                    RotationDir::Ccw => wrap_angle(along + PI),
                }
            }
        }
    }

    /// True iff the polar point `(r, theta)` lies on or inside the boundary.
    pub fn contains(&self, r: f64, theta: f64) -> bool {
        r <= self.radius_at(theta)
    }
}

/// Intersect the ray from the origin at angle `theta` with the polygon
/// boundary; returns `(distance, edge_index)`. For a star-shaped polygon
/// exactly one edge is crossed; rays through a vertex resolve to the first
/// edge in storage order.
fn ray_hit(vertices: &[Vec2], theta: f64) -> (f64, usize) {
    let d = Vec2::new(theta.cos(), theta.sin());
    let mut best: Option<(f64, usize)> = None;
    for i in 0..vertices.len() {
        let a = vertices[i];
        let b = vertices[(i + 1) % vertices.len()];
        let e = b - a;
        let denom = d.cross(e);
        if denom.abs() < 1e-300 {
            continue; // ray parallel to edge
        }
        let t = a.cross(e) / denom;
        let s = a.cross(d) / denom;
        if t > 0.0 && (-EDGE_PARAM_EPS..=1.0 + EDGE_PARAM_EPS).contains(&s)
            && best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, i));
            }
    }
    best.expect("star-shaped polygon intersects every ray from the origin")
}
