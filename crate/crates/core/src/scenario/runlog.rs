//! RunLog persistence: a run directory holds a TOML manifest (version plus
//! the exact config snapshot), one set of delimited-text files per agent,
//! and the computed metrics report.
//!
//! ```text
//! <dir>/manifest.toml
//! <dir>/metrics.json
//! <dir>/agent_00.traj.csv       t,x,y,r,theta,psi
//! <dir>/agent_00.samples.csv    t_meas,t_recv,r,u_r,source
//! <dir>/agent_00.commands.csv   t,psi_cmd
//! ```
//!
//! Floats are written with the shortest representation that parses back to
//! the identical bits, so save/load round-trips exactly and byte comparison
//! of two directories is a valid determinism check.

use super::{CommandEvent, RunLog, ScenarioFile};
use crate::channel::{RangeSample, RateSource};
use crate::metrics::{Trajectory, TrajectorySample};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunLogError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("manifest error: {0}")]
    Manifest(#[from] toml::de::Error),
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    version: String,
    config: ScenarioFile,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunLogError + '_ {
    move |source| RunLogError::Io {
        path: path.display().to_string(),
        source,
    }
}

impl RunLog {
    pub fn save(&self, dir: &Path) -> Result<(), RunLogError> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let manifest = Manifest {
            version: self.version.clone(),
            config: self.config.clone(),
        };
        let manifest_toml =
            toml::to_string_pretty(&manifest).expect("manifest serializes");
        write_file(&dir.join("manifest.toml"), &manifest_toml)?;

        if let Ok(report) = self.compute_report() {
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            write_file(&dir.join("metrics.json"), &json)?;
        }

        for (id, traj) in self.trajectories.iter().enumerate() {
            let mut out = String::from("t,x,y,r,theta,psi\n");
            for s in &traj.samples {
                writeln!(out, "{},{},{},{},{},{}", s.t, s.x, s.y, s.r, s.theta, s.psi).unwrap();
            }
            write_file(&dir.join(format!("agent_{id:02}.traj.csv")), &out)?;

            let mut out = String::from("t_meas,t_recv,r,u_r,t_rate,source\n");
            for s in &self.samples[id] {
                let u_r = s.u_r.map(|v| v.to_string()).unwrap_or_default();
                let t_rate = s.t_rate.map(|v| v.to_string()).unwrap_or_default();
                let source = match s.source {
                    RateSource::Consecutive => "consecutive",
                    RateSource::Doppler => "doppler",
                };
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    s.t_meas, s.t_recv, s.r, u_r, t_rate, source
                )
                .unwrap();
            }
            write_file(&dir.join(format!("agent_{id:02}.samples.csv")), &out)?;

            let mut out = String::from("t,psi_cmd\n");
            for c in &self.commands[id] {
                writeln!(out, "{},{}", c.t, c.psi_cmd).unwrap();
            }
            write_file(&dir.join(format!("agent_{id:02}.commands.csv")), &out)?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<RunLog, RunLogError> {
        let manifest_path = dir.join("manifest.toml");
        let manifest_str =
            std::fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
        let manifest: Manifest = toml::from_str(&manifest_str)?;
        let n = manifest.config.scenario.n_agents;

        let mut trajectories = Vec::with_capacity(n);
        let mut samples = Vec::with_capacity(n);
        let mut commands = Vec::with_capacity(n);
        for id in 0..n {
            trajectories.push(Trajectory {
                agent_id: id,
                samples: read_csv(dir, &format!("agent_{id:02}.traj.csv"), parse_traj_row)?,
            });
            samples.push(read_csv(
                dir,
                &format!("agent_{id:02}.samples.csv"),
                |fields, file, line| parse_sample_row(id, fields, file, line),
            )?);
            commands.push(read_csv(
                dir,
                &format!("agent_{id:02}.commands.csv"),
                parse_command_row,
            )?);
        }
        Ok(RunLog {
            version: manifest.version,
            config: manifest.config,
            trajectories,
            samples,
            commands,
        })
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), RunLogError> {
    std::fs::write(path, content).map_err(io_err(path))
}

fn read_csv<T>(
    dir: &Path,
    name: &str,
    parse: impl Fn(&[&str], &str, usize) -> Result<T, RunLogError>,
) -> Result<Vec<T>, RunLogError> {
    let path = dir.join(name);
    let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
    text.lines()
        .enumerate()
        .skip(1) // header
        .filter(|(_, line)| !line.is_empty())
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            parse(&fields, name, i + 1)
        })
        .collect()
}

fn bad_row(file: &str, line: usize, msg: impl Into<String>) -> RunLogError {
    RunLogError::Parse {
        file: file.to_string(),
        line,
        msg: msg.into(),
    }
}

fn field_f64(fields: &[&str], idx: usize, file: &str, line: usize) -> Result<f64, RunLogError> {
    fields
        .get(idx)
        .ok_or_else(|| bad_row(file, line, format!("missing field {idx}")))?
        .parse()
        .map_err(|e| bad_row(file, line, format!("field {idx}: {e}")))
}

fn parse_traj_row(fields: &[&str], file: &str, line: usize) -> Result<TrajectorySample, RunLogError> {
    if fields.len() != 6 {
        return Err(bad_row(file, line, "expected 6 fields"));
    }
    Ok(TrajectorySample {
        t: field_f64(fields, 0, file, line)?,
        x: field_f64(fields, 1, file, line)?,
        y: field_f64(fields, 2, file, line)?,
        r: field_f64(fields, 3, file, line)?,
        theta: field_f64(fields, 4, file, line)?,
        psi: field_f64(fields, 5, file, line)?,
    })
}

fn parse_sample_row(
    agent_id: usize,
    fields: &[&str],
    file: &str,
    line: usize,
) -> Result<RangeSample, RunLogError> {
    if fields.len() != 6 {
        return Err(bad_row(file, line, "expected 6 fields"));
    }
    let opt = |idx: usize| -> Result<Option<f64>, RunLogError> {
        if fields[idx].is_empty() {
            Ok(None)
        } else {
            field_f64(fields, idx, file, line).map(Some)
        }
    };
    let u_r = opt(3)?;
    let t_rate = opt(4)?;
    let source = match fields[5] {
        "consecutive" => RateSource::Consecutive,
        "doppler" => RateSource::Doppler,
        other => return Err(bad_row(file, line, format!("unknown source `{other}`"))),
    };
    Ok(RangeSample {
        agent_id,
        t_meas: field_f64(fields, 0, file, line)?,
        t_recv: field_f64(fields, 1, file, line)?,
        r: field_f64(fields, 2, file, line)?,
        u_r,
        t_rate,
        source,
    })
}

fn parse_command_row(fields: &[&str], file: &str, line: usize) -> Result<CommandEvent, RunLogError> {
    if fields.len() != 2 {
        return Err(bad_row(file, line, "expected 2 fields"));
    }
    Ok(CommandEvent {
        t: field_f64(fields, 0, file, line)?,
        psi_cmd: field_f64(fields, 1, file, line)?,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{run, ScenarioFile};
    use super::*;

    fn small_log() -> RunLog {
        let toml = r#"
            [scenario]
            duration = 30.0
            n_agents = 2
            seed = 5

            [shape]
            kind = "circle"
            radius = 2.0

            [channel]
            slot_time = 1.0
            loss_prob = 0.1
            rate_source = "doppler"
            range_noise_std = 0.02
            doppler_noise_std = 0.01
            ranging_increment = 0.047
            timing_mode = "protocol"
        "#;
        let cfg = ScenarioFile::from_toml_str(toml).unwrap().resolve().unwrap();
        run(&cfg)
    }

    #[test]
    fn save_load_round_trips_exactly() {
        let log = small_log();
        let dir = std::env::temp_dir().join(format!("auvsim-runlog-{}", std::process::id()));
        log.save(&dir).unwrap();
        let loaded = RunLog::load(&dir).unwrap();
        assert_eq!(log, loaded);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn saved_bytes_are_deterministic() {
        let a = small_log();
        let b = small_log();
        let base = std::env::temp_dir().join(format!("auvsim-det-{}", std::process::id()));
        let (da, db) = (base.join("a"), base.join("b"));
        a.save(&da).unwrap();
        b.save(&db).unwrap();
        for entry in std::fs::read_dir(&da).unwrap() {
            let name = entry.unwrap().file_name();
            let ba = std::fs::read(da.join(&name)).unwrap();
            let bb = std::fs::read(db.join(&name)).unwrap();
            assert_eq!(ba, bb, "{name:?} differs");
        }
        std::fs::remove_dir_all(&base).ok();
    }

    #[test]
    fn corrupt_row_reports_file_and_line() {
        let log = small_log();
        let dir = std::env::temp_dir().join(format!("auvsim-corrupt-{}", std::process::id()));
        log.save(&dir).unwrap();
        let path = dir.join("agent_00.traj.csv");
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str("not,a,valid,row\n");
        std::fs::write(&path, text).unwrap();
        let err = RunLog::load(&dir).unwrap_err();
        assert!(matches!(err, RunLogError::Parse { .. }), "{err}");
        std::fs::remove_dir_all(&dir).ok();
    }
}
