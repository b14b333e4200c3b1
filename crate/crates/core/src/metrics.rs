//! Evaluation metrics over trajectory logs.
//!
//! Fencing is scored per "dip" — the trajectory section from a boundary exit
//! to the re-entry — via the maximum range error (largest dip peak), the mean
//! peak error, and the average return time. Milling is scored over the whole
//! trajectory via the radial error `e(t) = r(t) - R_d(theta(t))`: maximum
//! outward excursion, mean radius, accuracy (mean radial bias), precision
//! (RMS spread of the radius about its mean), and a settle time.

use crate::shapes::ShapeSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Range from the beacon; equals hypot(x, y) by construction.
    pub r: f64,
    /// True polar angle of the vehicle, radians.
    pub theta: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub agent_id: usize,
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    /// Samples from time `t0` on (used to drop a convergence transient).
    pub fn skip_until(&self, t0: f64) -> Trajectory {
        Trajectory {
            agent_id: self.agent_id,
            samples: self
                .samples
                .iter()
                .filter(|s| s.t >= t0)
                .copied()
                .collect(),
        }
    }
}

/// One boundary excursion. `complete` is false when the trajectory ended
/// outside: the dip is then delimited at the sample of minimal outside range
/// after its peak, and excluded from return-time averaging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dip {
    pub t_start: f64,
    pub t_end: f64,
    /// Largest `r - R_d(theta)` over the dip, m.
    pub peak: f64,
    pub return_time: f64,
    pub complete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FencingMetrics {
    /// Maximum range error: largest dip peak, m.
    pub mre: f64,
    /// Mean peak error over all dips, m.
    pub mpe: f64,
    /// Average return time over complete dips, s; absent without one.
    pub art: Option<f64>,
    pub n_dips: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MillingMetrics {
    /// Largest positive radial error over the whole trajectory, m (0 when
    /// the vehicle never leaves the path outward).
    pub mre: f64,
    /// Mean range, m.
    pub r_mean: f64,
    /// Accuracy: mean radial error (bias), m.
    pub accuracy: f64,
    /// Precision: RMS of `r - r_mean`, m.
    pub precision: f64,
    /// First time after which |e| stays inside the settle band, s.
    pub settle_time: Option<f64>,
}

/// Settling criterion: the trajectory counts as settled from the first
/// sample after which `|e(t)|` never leaves the band again, provided at
/// least `min_window` seconds of trajectory remain past that point. A band
/// of `None` defaults to 10% of the mean boundary radius seen by the
/// trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettleSpec {
    pub band: Option<f64>,
    pub min_window: f64,
}

impl Default for SettleSpec {
    fn default() -> Self {
        Self {
            band: None,
            min_window: 30.0,
        }
    }
}

/// Run-level report: per-agent and pooled views of whichever metric family
/// applies. Serialized as the `metrics.json` artifact of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n_samples: usize,
    pub per_agent_fencing: Vec<Option<FencingMetrics>>,
    pub per_agent_milling: Vec<Option<MillingMetrics>>,
    pub fencing: Option<FencingMetrics>,
    pub milling: Option<MillingMetrics>,
}

/// Split a trajectory into dips. A dip opens at each inside-to-outside
/// crossing of `r > R_d(theta)` and closes at re-entry; a trajectory ending
/// outside contributes a final incomplete dip.
pub fn segment_dips(traj: &Trajectory, shape: &ShapeSpec) -> Vec<Dip> {
    let mut dips = Vec::new();
    let mut open: Option<(f64, f64)> = None; // (t_start, peak so far)
    let mut outside_run: Vec<(f64, f64)> = Vec::new(); // (t, e) of current excursion
    for s in &traj.samples {
        let e = s.r - shape.radius_at(s.theta);
        if e > 0.0 {
            match open {
                Some((t0, peak)) => {
                    open = Some((t0, peak.max(e)));
                }
                None => {
                    open = Some((s.t, e));
                    outside_run.clear();
                }
            }
            outside_run.push((s.t, e));
        } else if let Some((t0, peak)) = open.take() {
            dips.push(Dip {
                t_start: t0,
                t_end: s.t,
                peak,
                return_time: s.t - t0,
                complete: true,
            });
        }
    }
    if let Some((t0, _)) = open {
        // Trailing excursion: delimit at the minimal outside range after the
        // peak, report as incomplete.
        let peak_idx = outside_run
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(i, _)| i)
            .unwrap();
        let (t_end, _) = outside_run[peak_idx..]
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let peak = outside_run
            .iter()
            .take_while(|(t, _)| *t <= t_end)
            .map(|(_, e)| *e)
            .fold(0.0, f64::max);
        dips.push(Dip {
            t_start: t0,
            t_end,
            peak,
            return_time: t_end - t0,
            complete: false,
        });
    }
    dips
}

/// MRE, MPE, ART over a dip list. Absent (not zero) when there are no dips;
/// ART absent without a complete dip.
pub fn fencing_metrics(dips: &[Dip]) -> Option<FencingMetrics> {
    if dips.is_empty() {
        return None;
    }
    let mre = dips.iter().map(|d| d.peak).fold(f64::NEG_INFINITY, f64::max);
    let mpe = dips.iter().map(|d| d.peak).sum::<f64>() / dips.len() as f64;
    let complete: Vec<&Dip> = dips.iter().filter(|d| d.complete).collect();
    let art = if complete.is_empty() {
        None
    } else {
        Some(complete.iter().map(|d| d.return_time).sum::<f64>() / complete.len() as f64)
    };
    Some(FencingMetrics {
        mre,
        mpe,
        art,
        n_dips: dips.len(),
    })
}

/// Milling metrics over one trajectory.
pub fn milling_metrics(
    traj: &Trajectory,
    shape: &ShapeSpec,
    settle: &SettleSpec,
) -> Option<MillingMetrics> {
    milling_metrics_pooled(std::slice::from_ref(traj), shape, settle)
}

/// Milling metrics pooling every agent's samples into one population, the
/// way a run is reported: one mean radius, one bias, one spread. The settle
/// time is the latest per-agent settle (absent if any agent never settles).
pub fn milling_metrics_pooled(
    trajs: &[Trajectory],
    shape: &ShapeSpec,
    settle: &SettleSpec,
) -> Option<MillingMetrics> {
    let n: usize = trajs.iter().map(|t| t.samples.len()).sum();
    if n == 0 {
        return None;
    }
    let mut sum_r = 0.0;
    let mut sum_e = 0.0;
    let mut sum_rd = 0.0;
    let mut mre = 0.0f64;
    for traj in trajs {
        for s in &traj.samples {
            let rd = shape.radius_at(s.theta);
            let e = s.r - rd;
            sum_r += s.r;
            sum_e += e;
            sum_rd += rd;
            mre = mre.max(e);
        }
    }
    let r_mean = sum_r / n as f64;
    let accuracy = sum_e / n as f64;
    let var: f64 = trajs
        .iter()
        .flat_map(|t| t.samples.iter())
        .map(|s| (s.r - r_mean).powi(2))
        .sum::<f64>()
        / n as f64;
    let band = settle.band.unwrap_or(0.1 * sum_rd / n as f64);
    let settle_time = trajs
        .iter()
        .map(|t| settle_time_of(t, shape, band, settle.min_window))
        .collect::<Option<Vec<f64>>>()
        .map(|times| times.into_iter().fold(f64::NEG_INFINITY, f64::max));
    Some(MillingMetrics {
        mre,
        r_mean,
        accuracy,
        precision: var.sqrt(),
        settle_time,
    })
}

fn settle_time_of(traj: &Trajectory, shape: &ShapeSpec, band: f64, min_window: f64) -> Option<f64> {
    let samples = &traj.samples;
    if samples.is_empty() {
        return None;
    }
    let mut idx = 0usize; // first index of the settled suffix
    for (i, s) in samples.iter().enumerate() {
        let e = s.r - shape.radius_at(s.theta);
        if e.abs() > band {
            idx = i + 1;
        }
    }
    if idx >= samples.len() {
        return None;
    }
    let t_settle = samples[idx].t;
    let t_last = samples.last().unwrap().t;
    (t_last - t_settle >= min_window).then_some(t_settle)
}

/// Assemble the per-run report from all agent trajectories.
pub fn report_for_run(
    trajs: &[Trajectory],
    shape: &ShapeSpec,
    settle: &SettleSpec,
) -> MetricsReport {
    let per_agent_dips: Vec<Vec<Dip>> = trajs.iter().map(|t| segment_dips(t, shape)).collect();
    let pooled_dips: Vec<Dip> = per_agent_dips.iter().flatten().copied().collect();
    MetricsReport {
        n_samples: trajs.iter().map(|t| t.samples.len()).sum(),
        per_agent_fencing: per_agent_dips.iter().map(|d| fencing_metrics(d)).collect(),
        per_agent_milling: trajs
            .iter()
            .map(|t| milling_metrics(t, shape, settle))
            .collect(),
        fencing: fencing_metrics(&pooled_dips),
        milling: milling_metrics_pooled(trajs, shape, settle),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn traj_from_r(rs: &[(f64, f64)]) -> Trajectory {
        Trajectory {
            agent_id: 0,
            samples: rs
                .iter()
                .map(|&(t, r)| TrajectorySample {
                    t,
                    x: r,
                    y: 0.0,
                    r,
                    theta: 0.0,
                    psi: 0.0,
                })
                .collect(),
        }
    }

    fn circle(r: f64) -> ShapeSpec {
        ShapeSpec::circle(r).unwrap()
    }

    #[test]
    fn sinusoid_gives_two_unit_dips() {
        // r(t) = 2 + max(0, sin(pi t / 10)) on a circle of radius 2: two
        // excursions of peak 1 and duration 10 s over t in [0, 40].
        let dt = 0.01;
        let samples: Vec<(f64, f64)> = (0..=4000)
            .map(|k| {
                let t = k as f64 * dt;
                (t, 2.0 + (PI * t / 10.0).sin().max(0.0))
            })
            .collect();
        let dips = segment_dips(&traj_from_r(&samples), &circle(2.0));
        assert_eq!(dips.len(), 2);
        for d in &dips {
            assert!((d.peak - 1.0).abs() < 1e-6, "peak {}", d.peak);
            assert!((d.return_time - 10.0).abs() < 2.0 * dt, "ret {}", d.return_time);
            assert!(d.complete);
        }
        let m = fencing_metrics(&dips).unwrap();
        assert!((m.mre - 1.0).abs() < 1e-6);
        assert!((m.mpe - 1.0).abs() < 1e-6);
        assert!((m.art.unwrap() - 10.0).abs() < 2.0 * dt);
    }

    #[test]
    fn fully_inside_trajectory_has_no_dips() {
        let samples: Vec<(f64, f64)> = (0..100).map(|k| (k as f64, 1.5)).collect();
        let dips = segment_dips(&traj_from_r(&samples), &circle(2.0));
        assert!(dips.is_empty());
        assert_eq!(fencing_metrics(&dips), None);
    }

    #[test]
    fn trailing_excursion_is_incomplete_and_delimited_after_peak() {
        // Exit to 2.9, fall back to 2.4 (still outside), end of log.
        let samples = [
            (0.0, 1.8),
            (1.0, 2.3),
            (2.0, 2.9),
            (3.0, 2.6),
            (4.0, 2.4),
        ];
        let dips = segment_dips(&traj_from_r(&samples), &circle(2.0));
        assert_eq!(dips.len(), 1);
        let d = dips[0];
        assert!(!d.complete);
        assert!((d.peak - 0.9).abs() < 1e-12);
        assert_eq!(d.t_start, 1.0);
        assert_eq!(d.t_end, 4.0);
        let m = fencing_metrics(&dips).unwrap();
        assert_eq!(m.art, None);
    }

    #[test]
    fn peaks_aggregate_to_max_and_mean() {
        let dips = [
            Dip { t_start: 0.0, t_end: 10.0, peak: 0.5, return_time: 10.0, complete: true },
            Dip { t_start: 20.0, t_end: 32.0, peak: 1.5, return_time: 12.0, complete: true },
            Dip { t_start: 40.0, t_end: 48.0, peak: 1.0, return_time: 8.0, complete: true },
        ];
        let m = fencing_metrics(&dips).unwrap();
        assert!((m.mre - 1.5).abs() < 1e-15);
        assert!((m.mpe - 1.0).abs() < 1e-15);
        assert!((m.art.unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn single_dip_mre_equals_mpe() {
        let dips = [Dip {
            t_start: 0.0,
            t_end: 5.0,
            peak: 1.905,
            return_time: 5.0,
            complete: true,
        }];
        let m = fencing_metrics(&dips).unwrap();
        assert_eq!(m.mre, 1.905);
        assert_eq!(m.mpe, 1.905);
    }

    #[test]
    fn constant_radius_bias() {
        let samples: Vec<(f64, f64)> = (0..500).map(|k| (k as f64, 3.221)).collect();
        let m = milling_metrics(&traj_from_r(&samples), &circle(2.0), &SettleSpec::default())
            .unwrap();
        assert!((m.accuracy - 1.221).abs() < 1e-12);
        assert!(m.precision < 1e-12);
        assert!((m.r_mean - 3.221).abs() < 1e-12);
    }

    #[test]
    fn on_path_trajectory_scores_zero() {
        let samples: Vec<(f64, f64)> = (0..200).map(|k| (k as f64, 2.0)).collect();
        let m = milling_metrics(&traj_from_r(&samples), &circle(2.0), &SettleSpec::default())
            .unwrap();
        assert_eq!(m.mre, 0.0);
        assert_eq!(m.accuracy, 0.0);
        assert_eq!(m.precision, 0.0);
        assert_eq!(m.settle_time, Some(0.0));
    }

    #[test]
    fn sinusoidal_radius_rms() {
        // r = 30 + 0.1 sin(w t) over whole periods: zero bias, RMS 0.1/sqrt(2).
        let period = 50.0;
        let n_per = 100usize;
        let dt = period / n_per as f64;
        let samples: Vec<(f64, f64)> = (0..(10 * n_per))
            .map(|k| {
                let t = k as f64 * dt;
                (t, 30.0 + 0.1 * (2.0 * PI * t / period).sin())
            })
            .collect();
        let m = milling_metrics(&traj_from_r(&samples), &circle(30.0), &SettleSpec::default())
            .unwrap();
        assert!(m.accuracy.abs() < 1e-12);
        assert!((m.precision - 0.1 / 2f64.sqrt()).abs() < 1e-3);
        assert!((m.mre - 0.1).abs() < 1e-3);
    }

    #[test]
    fn settle_requires_staying_in_band() {
        // Error decays below the band at t=30 but pops out once at t=60.
        let samples: Vec<(f64, f64)> = (0..200)
            .map(|k| {
                let t = k as f64;
                let e = if t < 30.0 {
                    1.0
                } else if (t - 60.0).abs() < 0.5 {
                    0.5
                } else {
                    0.05
                };
                (t, 2.0 + e)
            })
            .collect();
        let spec = SettleSpec {
            band: Some(0.2),
            min_window: 30.0,
        };
        let m = milling_metrics(&traj_from_r(&samples), &circle(2.0), &spec).unwrap();
        assert_eq!(m.settle_time, Some(61.0));
    }

    #[test]
    fn settle_absent_when_band_never_holds() {
        let samples: Vec<(f64, f64)> = (0..100).map(|k| (k as f64, 4.0)).collect();
        let spec = SettleSpec {
            band: Some(0.2),
            min_window: 30.0,
        };
        let m = milling_metrics(&traj_from_r(&samples), &circle(2.0), &spec).unwrap();
        assert_eq!(m.settle_time, None);
    }

    #[test]
    fn dips_partition_outside_samples() {
        // Every strictly-outside sample falls inside exactly one dip span.
        let samples: Vec<(f64, f64)> = (0..=600)
            .map(|k| {
                let t = k as f64 * 0.1;
                (t, 2.0 + (0.37 * t).sin() * 1.3)
            })
            .collect();
        let traj = traj_from_r(&samples);
        let shape = circle(2.0);
        let dips = segment_dips(&traj, &shape);
        for s in &traj.samples {
            let outside = s.r > 2.0;
            let covering = dips
                .iter()
                .filter(|d| s.t >= d.t_start && s.t < d.t_end + 1e-12)
                .count();
            if outside {
                assert!(covering >= 1, "t={} uncovered", s.t);
            }
        }
        // Spans never overlap.
        for w in dips.windows(2) {
            assert!(w[0].t_end <= w[1].t_start + 1e-12);
        }
    }

    #[test]
    fn metrics_invariant_under_time_shift() {
        let samples: Vec<(f64, f64)> = (0..=400)
            .map(|k| {
                let t = k as f64 * 0.1;
                (t, 2.0 + (0.3 * t).sin())
            })
            .collect();
        let shifted: Vec<(f64, f64)> = samples.iter().map(|&(t, r)| (t + 137.0, r)).collect();
        let a = fencing_metrics(&segment_dips(&traj_from_r(&samples), &circle(2.0)));
        let b = fencing_metrics(&segment_dips(&traj_from_r(&shifted), &circle(2.0)));
        match (a, b) {
            (Some(a), Some(b)) => {
                assert!((a.mre - b.mre).abs() < 1e-12);
                assert!((a.mpe - b.mpe).abs() < 1e-12);
                assert_eq!(a.n_dips, b.n_dips);
            }
            _ => panic!("expected dips"),
        }
    }

    #[test]
    fn precision_is_independent_of_path_radius() {
        let mk = |r0: f64| {
            let samples: Vec<(f64, f64)> = (0..500)
                .map(|k| (k as f64, r0 + 0.2 * ((k as f64) * 0.7).sin()))
                .collect();
            milling_metrics(&traj_from_r(&samples), &circle(r0), &SettleSpec::default()).unwrap()
        };
        let small = mk(2.0);
        let large = mk(30.0);
        assert!((small.precision - large.precision).abs() < 1e-12);
        // Bias shifts one-for-one with the path radius offset.
        assert!((small.accuracy - large.accuracy).abs() < 1e-12);
    }
}
