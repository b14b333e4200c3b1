//! Acoustic link model: scheduled round-robin ranging with one-slot latency,
//! optional packet loss, measurement noise, range quantization, and two
//! range-rate sources (consecutive-range difference vs instantaneous
//! Doppler).
//!
//! Two timing modes are provided. `Simple` reproduces the simulation model:
//! one range delivery per slot, agents served round-robin, so the per-agent
//! update period is `n_agents * slot_time`. `Protocol` follows the hardware
//! sequence of ping, ack, and broadcast slots per agent (period
//! `3 * n_agents * slot_time`); in Doppler mode every broadcast also hands
//! each agent a fresh range-rate sample, which is what makes that source
//! scale with fleet size.

use crate::geom::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("invalid channel parameter {field}: {value}")]
    Invalid { field: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateSource {
    Consecutive,
    Doppler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimingMode {
    Simple,
    Protocol,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    /// Transmission time of one package, s.
    pub slot_time: f64,
    /// Probability that a scheduled delivery is dropped.
    pub loss_prob: f64,
    pub rate_source: RateSource,
    /// Gaussian noise on delivered ranges, m.
    pub range_noise_std: f64,
    /// Gaussian noise on Doppler range rates, m/s.
    pub doppler_noise_std: f64,
    /// Round delivered ranges to this increment; 0 disables.
    pub ranging_increment: f64,
    pub timing_mode: TimingMode,
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            slot_time: 1.0,
            loss_prob: 0.0,
            rate_source: RateSource::Consecutive,
            range_noise_std: 0.0,
            doppler_noise_std: 0.0,
            ranging_increment: 0.0,
            timing_mode: TimingMode::Simple,
            seed: 0,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let checks = [
            ("slot_time", self.slot_time, self.slot_time > 0.0),
            (
                "loss_prob",
                self.loss_prob,
                (0.0..1.0).contains(&self.loss_prob),
            ),
            (
                "range_noise_std",
                self.range_noise_std,
                self.range_noise_std >= 0.0,
            ),
            (
                "doppler_noise_std",
                self.doppler_noise_std,
                self.doppler_noise_std >= 0.0,
            ),
            (
                "ranging_increment",
                self.ranging_increment,
                self.ranging_increment >= 0.0,
            ),
        ];
        for (field, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(ChannelError::Invalid { field, value });
            }
        }
        Ok(())
    }
}

/// One delivered range measurement. `u_r` is the radial speed paired with
/// the range, positive when the range is increasing; it is absent until a
/// consecutive-mode agent has two measurements. `t_rate` is the instant the
/// rate refers to: the midpoint of the differenced interval for consecutive
/// rates, the measurement instant for Doppler.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeSample {
    pub agent_id: usize,
    /// When the true range was sampled, s.
    pub t_meas: f64,
    /// When the agent receives it, s.
    pub t_recv: f64,
    pub r: f64,
    pub u_r: Option<f64>,
    pub t_rate: Option<f64>,
    pub source: RateSource,
}

/// A range-rate-only delivery (Doppler broadcast reception). Measured at the
/// instant of reception, so it carries no delay.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSample {
    pub agent_id: usize,
    pub t: f64,
    pub u_r: f64,
}

/// What a slot completion schedules. In `Simple` mode every slot completes a
/// range delivery; in `Protocol` mode only every third slot (the broadcast)
/// delivers anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotEvent {
    /// Own-range delivery to `agent`.
    Range { agent: usize },
    /// Broadcast closing `agent`'s ranging cycle: range to `agent`, plus (in
    /// Doppler mode) a rate sample to every agent.
    Broadcast { agent: usize },
}

/// Deterministic round-robin schedule. `slot_idx` counts slot completions
/// starting at 1 (a completion at time `slot_idx * slot_time`).
pub fn schedule_tick(cfg: &ChannelConfig, n_agents: usize, slot_idx: u64) -> Option<SlotEvent> {
    if n_agents == 0 || slot_idx == 0 {
        return None;
    }
    let s = slot_idx - 1;
    match cfg.timing_mode {
        TimingMode::Simple => Some(SlotEvent::Range {
            agent: (s % n_agents as u64) as usize,
        }),
        TimingMode::Protocol => {
            let pos = s % (3 * n_agents as u64);
            if pos % 3 == 2 {
                Some(SlotEvent::Broadcast {
                    agent: (pos / 3) as usize,
                })
            } else {
                None
            }
        }
    }
}

/// Round `r` to the nearest multiple of `increment`; `increment == 0`
/// disables quantization.
pub fn quantize_range(r: f64, increment: f64) -> f64 {
    if increment <= 0.0 {
        r
    } else {
        (r / increment).round() * increment
    }
}

/// Ground truth handed to the channel when it samples an agent: position and
/// instantaneous range rate (both including ambient flow).
#[derive(Debug, Clone, Copy)]
pub struct Kinematics {
    pub pos: Vec2,
    pub radial_speed: f64,
}

#[derive(Debug, Default)]
pub struct ChannelOutput {
    pub ranges: Vec<RangeSample>,
    pub rates: Vec<RateSample>,
}

/// Stateful channel: owns the per-agent RNG streams and the floater's memory
/// of the previous measured range per agent (for consecutive range rates).
///
/// Per-agent RNG streams keep agents decoupled: adding or perturbing one
/// agent cannot shift the noise/loss sequence another agent observes.
pub struct Channel {
    cfg: ChannelConfig,
    n_agents: usize,
    last_meas: Vec<Option<(f64, f64)>>,
    rngs: Vec<ChaCha8Rng>,
}

impl Channel {
    pub fn new(cfg: ChannelConfig, n_agents: usize) -> Self {
        let rngs = (0..n_agents)
            .map(|a| {
                ChaCha8Rng::seed_from_u64(
                    cfg.seed ^ (a as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                )
            })
            .collect();
        Self {
            cfg,
            n_agents,
            last_meas: vec![None; n_agents],
            rngs,
        }
    }

    pub fn slot_time(&self) -> f64 {
        self.cfg.slot_time
    }

    /// Process the slot completing at `slot_idx * slot_time`. `probe` must
    /// return the true kinematics of an agent at any time up to and
    /// including the completion instant.
    pub fn poll(
        &mut self,
        slot_idx: u64,
        probe: &dyn Fn(usize, f64) -> Kinematics,
    ) -> ChannelOutput {
        let mut out = ChannelOutput::default();
        let Some(event) = schedule_tick(&self.cfg, self.n_agents, slot_idx) else {
            return out;
        };
        let t_recv = slot_idx as f64 * self.cfg.slot_time;
        let t_meas = t_recv - self.cfg.slot_time;
        match event {
            SlotEvent::Range { agent } => {
                if let Some(sample) = self.measure(agent, t_meas, t_recv, probe) {
                    out.ranges.push(sample);
                }
            }
            SlotEvent::Broadcast { agent } => {
                if let Some(sample) = self.measure(agent, t_meas, t_recv, probe) {
                    out.ranges.push(sample);
                }
                if self.cfg.rate_source == RateSource::Doppler {
                    for i in 0..self.n_agents {
                        if self.lost(i) {
                            continue;
                        }
                        let truth = probe(i, t_recv);
                        let u_r = truth.radial_speed + self.gauss(i, self.cfg.doppler_noise_std);
                        out.rates.push(RateSample {
                            agent_id: i,
                            t: t_recv,
                            u_r,
                        });
                    }
                }
            }
        }
        out
    }

    fn measure(
        &mut self,
        agent: usize,
        t_meas: f64,
        t_recv: f64,
        probe: &dyn Fn(usize, f64) -> Kinematics,
    ) -> Option<RangeSample> {
        if self.lost(agent) {
            return None;
        }
        let truth = probe(agent, t_meas);
        let noisy = truth.pos.norm() + self.gauss(agent, self.cfg.range_noise_std);
        let r = quantize_range(noisy.max(0.0), self.cfg.ranging_increment);
        let (u_r, t_rate) = match self.cfg.rate_source {
            RateSource::Consecutive => match self.last_meas[agent] {
                Some((t_prev, r_prev)) => {
                    debug_assert!(t_meas > t_prev);
                    (
                        Some((r - r_prev) / (t_meas - t_prev)),
                        Some((t_meas + t_prev) / 2.0),
                    )
                }
                None => (None, None),
            },
            RateSource::Doppler => (
                Some(truth.radial_speed + self.gauss(agent, self.cfg.doppler_noise_std)),
                Some(t_meas),
            ),
        };
        self.last_meas[agent] = Some((t_meas, r));
        Some(RangeSample {
            agent_id: agent,
            t_meas,
            t_recv,
            r,
            u_r,
            t_rate,
            source: self.cfg.rate_source,
        })
    }

    fn lost(&mut self, agent: usize) -> bool {
        self.cfg.loss_prob > 0.0 && self.rngs[agent].random::<f64>() < self.cfg.loss_prob
    }

    fn gauss(&mut self, agent: usize, std: f64) -> f64 {
        if std <= 0.0 {
            return 0.0;
        }
        Normal::new(0.0, std).unwrap().sample(&mut self.rngs[agent])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn static_probe(positions: Vec<Vec2>) -> impl Fn(usize, f64) -> Kinematics {
        move |agent, _t| Kinematics {
            pos: positions[agent],
            radial_speed: 0.0,
        }
    }

    #[test]
    fn simple_mode_round_robin_periods() {
        let cfg = ChannelConfig::default();
        for n in 1..=3usize {
            let mut deliveries: Vec<Vec<u64>> = vec![Vec::new(); n];
            for slot in 1..=30u64 {
                if let Some(SlotEvent::Range { agent }) = schedule_tick(&cfg, n, slot) {
                    deliveries[agent].push(slot);
                }
            }
            for d in &deliveries {
                for w in d.windows(2) {
                    assert_eq!(w[1] - w[0], n as u64);
                }
            }
        }
    }

    #[test]
    fn protocol_mode_period_is_three_slots_per_agent() {
        let cfg = ChannelConfig {
            timing_mode: TimingMode::Protocol,
            ..Default::default()
        };
        let mut agent0 = Vec::new();
        for slot in 1..=40u64 {
            if let Some(SlotEvent::Broadcast { agent: 0 }) = schedule_tick(&cfg, 2, slot) {
                agent0.push(slot);
            }
        }
        assert_eq!(agent0, vec![3, 9, 15, 21, 27, 33, 39]);
    }

    #[test]
    fn zero_noise_range_is_exact() {
        let mut ch = Channel::new(ChannelConfig::default(), 1);
        let probe = static_probe(vec![Vec2::new(3.0, 4.0)]);
        let out = ch.poll(1, &probe);
        let s = &out.ranges[0];
        assert_eq!(s.r, 5.0);
        assert_eq!(s.t_meas, 0.0);
        assert_eq!(s.t_recv, 1.0);
        assert_eq!(s.u_r, None);
    }

    #[test]
    fn consecutive_rate_is_secant_slope() {
        // Ranges 5.0 then 5.4, measured 2 s apart (two agents round-robin).
        let mut ch = Channel::new(ChannelConfig::default(), 2);
        let r = std::cell::Cell::new(5.0);
        let probe = |agent: usize, _t: f64| Kinematics {
            pos: Vec2::new(if agent == 0 { r.get() } else { 7.0 }, 0.0),
            radial_speed: 0.0,
        };
        let first = ch.poll(1, &probe);
        assert_eq!(first.ranges[0].u_r, None);
        ch.poll(2, &probe);
        r.set(5.4);
        let second = ch.poll(3, &probe);
        let u_r = second.ranges[0].u_r.unwrap();
        assert!((u_r - 0.2).abs() < 1e-12);
    }

    #[test]
    fn doppler_rate_sign_is_positive_when_receding() {
        let cfg = ChannelConfig {
            rate_source: RateSource::Doppler,
            ..Default::default()
        };
        let mut ch = Channel::new(cfg, 1);
        let probe = |_: usize, _: f64| Kinematics {
            pos: Vec2::new(10.0, 0.0),
            radial_speed: 0.2,
        };
        let out = ch.poll(1, &probe);
        assert_eq!(out.ranges[0].u_r, Some(0.2));
    }

    #[test]
    fn doppler_matches_analytic_rate_on_circular_motion() {
        // Agent on a circle of radius 5 around (12, 3): r(t) = |C + 5 e^{iwt}|,
        // analytic dr/dt compared against the probe-reported radial speed.
        let cfg = ChannelConfig {
            rate_source: RateSource::Doppler,
            ..Default::default()
        };
        let mut ch = Channel::new(cfg, 1);
        let (cx, cy, rho, w) = (12.0, 3.0, 5.0, 0.07);
        let probe = move |_: usize, t: f64| {
            let pos = Vec2::new(cx + rho * (w * t).cos(), cy + rho * (w * t).sin());
            let vel = Vec2::new(-rho * w * (w * t).sin(), rho * w * (w * t).cos());
            Kinematics {
                pos,
                radial_speed: pos.dot(vel) / pos.norm(),
            }
        };
        for slot in 1..=50u64 {
            let out = ch.poll(slot, &probe);
            let s = &out.ranges[0];
            let t = s.t_meas;
            // d/dt sqrt(cx^2+cy^2+rho^2 + 2 rho (cx cos wt + cy sin wt))
            let r = (cx * cx + cy * cy + rho * rho
                + 2.0 * rho * (cx * (w * t).cos() + cy * (w * t).sin()))
            .sqrt();
            let drdt = rho * w * (cy * (w * t).cos() - cx * (w * t).sin()) / r;
            assert!((s.u_r.unwrap() - drdt).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn quantization_examples() {
        assert!((quantize_range(5.03, 0.047) - 5.029).abs() < 1e-12);
        assert_eq!(quantize_range(0.0, 0.047), 0.0);
        assert_eq!(quantize_range(5.03, 0.0), 5.03);
    }

    #[test]
    fn loss_thins_delivery_rate() {
        let cfg = ChannelConfig {
            loss_prob: 0.27,
            seed: 42,
            ..Default::default()
        };
        let mut ch = Channel::new(cfg, 2);
        let probe = static_probe(vec![Vec2::new(3.0, 4.0), Vec2::new(6.0, 8.0)]);
        let mut delivered = 0usize;
        let slots = 10_000u64;
        for slot in 1..=slots {
            delivered += ch.poll(slot, &probe).ranges.len();
        }
        let expected = slots as f64 * 0.73;
        let sigma = (slots as f64 * 0.73 * 0.27).sqrt();
        assert!(
            (delivered as f64 - expected).abs() < 3.0 * sigma,
            "delivered={delivered} expected={expected}"
        );
    }

    #[test]
    fn same_seed_reproduces_sequences() {
        let cfg = ChannelConfig {
            loss_prob: 0.3,
            range_noise_std: 0.05,
            seed: 9,
            ..Default::default()
        };
        let probe = static_probe(vec![Vec2::new(3.0, 4.0)]);
        let run = |cfg: ChannelConfig| {
            let mut ch = Channel::new(cfg, 1);
            (1..=200u64)
                .flat_map(|s| ch.poll(s, &probe).ranges)
                .map(|s| s.r)
                .collect::<Vec<_>>()
        };
        assert_eq!(run(cfg.clone()), run(cfg));
    }

    #[test]
    fn doppler_broadcast_hands_rates_to_every_agent() {
        let cfg = ChannelConfig {
            rate_source: RateSource::Doppler,
            timing_mode: TimingMode::Protocol,
            ..Default::default()
        };
        let mut ch = Channel::new(cfg, 3);
        let probe = |agent: usize, _t: f64| Kinematics {
            pos: Vec2::new(5.0 + agent as f64, 0.0),
            radial_speed: 0.1 * (agent as f64 + 1.0),
        };
        // Slot 3 completes agent 0's broadcast.
        let out = ch.poll(3, &probe);
        assert_eq!(out.ranges.len(), 1);
        assert_eq!(out.ranges[0].agent_id, 0);
        assert_eq!(out.rates.len(), 3);
        for (i, rate) in out.rates.iter().enumerate() {
            assert_eq!(rate.agent_id, i);
            assert!((rate.u_r - 0.1 * (i as f64 + 1.0)).abs() < 1e-12);
            assert_eq!(rate.t, 3.0);
        }
    }
}
