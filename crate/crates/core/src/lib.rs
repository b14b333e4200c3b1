//! Planar multi-AUV simulator for range-only boundary control around a single
//! acoustic beacon.
//!
//! The crate models under-actuated vehicles (surge thrust plus rate-limited
//! heading slew), a scheduled acoustic channel that delivers delayed range and
//! range-rate measurements, and two controller families executing Fencing
//! (stay inside a boundary) and Milling (traverse a closed path around the
//! beacon):
//!
//! * RVB — range-variation-based rules using only the last two or three
//!   ranges; restricted to circular boundaries.
//! * HEB — heading-estimation-based control that regresses range rates
//!   against headings to estimate the beacon bearing, enabling arbitrary
//!   origin-star-shaped boundaries.
//!
//! Everything is deterministic under a seed: a [`scenario::RunLog`] can be
//! persisted, reloaded, and replayed bit-exactly.

pub mod angles;
pub mod behaviors;
pub mod channel;
pub mod dynamics;
pub mod geom;
pub mod metrics;
pub mod scenario;
pub mod shapes;

pub use behaviors::{
    estimate_theta, BehaviorConfig, BehaviorMode, BehaviorState, Command, Controller,
    ThetaEstimate,
};
pub use channel::{Channel, ChannelConfig, RangeSample, RateSample, RateSource, TimingMode};
pub use dynamics::{terminal_surge_speed, AgentState, DynamicsParams};
pub use geom::Vec2;
pub use metrics::{
    fencing_metrics, milling_metrics, segment_dips, Dip, FencingMetrics, MetricsReport,
    MillingMetrics, SettleSpec, Trajectory, TrajectorySample,
};
pub use scenario::{replay, run, RunLog, ScenarioConfig, ScenarioFile};
pub use shapes::{RotationDir, ShapeSpec};
