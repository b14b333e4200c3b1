//! The run / metrics / replay subcommands.

use crate::table;
use anyhow::{bail, Context, Result};
use auvsim_core::metrics::{report_for_run, SettleSpec, Trajectory};
use auvsim_core::scenario::{replay, run, RunLog, ScenarioFile};
use std::path::{Path, PathBuf};

pub fn cmd_run(
    config_path: &Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
    agents: Option<usize>,
    duration: Option<f64>,
) -> Result<()> {
    let mut file = ScenarioFile::from_path(config_path)
        .with_context(|| format!("loading {}", config_path.display()))?;
    if let Some(seed) = seed {
        file.scenario.seed = seed;
    }
    if let Some(agents) = agents {
        file.scenario.n_agents = agents;
    }
    if let Some(duration) = duration {
        file.scenario.duration = duration;
    }
    let cfg = file.resolve().context("invalid scenario")?;

    let out_dir = out.unwrap_or_else(|| {
        let stem = config_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into());
        crate::out_root().join(stem)
    });

    let log = run(&cfg);
    log.save(&out_dir)
        .with_context(|| format!("writing {}", out_dir.display()))?;
    let report = log.compute_report().context("computing metrics")?;

    println!(
        "ran {} agents for {} s ({} mode) -> {}",
        cfg.n_agents,
        cfg.duration,
        table::mode_str(cfg.behavior.mode),
        out_dir.display()
    );
    println!("{}", table::header_for(&file));
    println!("{}", table::row_for("run", &file, &report));
    Ok(())
}

/// Load a run directory and recompute its report, optionally from what the
/// channel delivered rather than the true trajectories.
fn load_and_report(dir: &Path, measured: bool) -> Result<(RunLog, auvsim_core::MetricsReport)> {
    let log = RunLog::load(dir).with_context(|| format!("loading {}", dir.display()))?;
    let report = if measured {
        let cfg = log.config.resolve().context("config in manifest")?;
        let trajs: Vec<Trajectory> = log
            .measured_trajectories()
            .context("rebuilding measured trajectories")?
            .iter()
            .map(|t| t.skip_until(cfg.metrics_skip))
            .collect();
        report_for_run(&trajs, &cfg.shape, &SettleSpec::default())
    } else {
        log.compute_report().context("computing metrics")?
    };
    Ok((log, report))
}

pub fn cmd_metrics(dirs: &[PathBuf], table: bool, measured: bool, json: bool) -> Result<()> {
    let mut loaded = Vec::new();
    for dir in dirs {
        let name = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string());
        let (log, report) = load_and_report(dir, measured)?;
        loaded.push((name, log, report));
    }

    if json {
        for (name, _, report) in &loaded {
            println!("{}", serde_json::json!({ "run": name, "report": report }));
        }
        return Ok(());
    }

    if table {
        let mut last_header = "";
        for (name, log, report) in &loaded {
            let header = table::header_for(&log.config);
            if header != last_header {
                println!("{header}");
                last_header = header;
            }
            println!("{}", table::row_for(name, &log.config, report));
        }
        return Ok(());
    }

    for (name, log, report) in &loaded {
        let file = &log.config;
        println!(
            "{name}: {} agents, {} s, {}{}",
            file.scenario.n_agents,
            file.scenario.duration,
            table::mode_str(file.behavior.mode),
            if measured { " (measured ranges)" } else { "" }
        );
        if table::is_fencing(file.behavior.mode) {
            match &report.fencing {
                Some(f) => println!(
                    "  MRE {:.3} m, MPE {:.3} m, ART {} over {} dips",
                    f.mre,
                    f.mpe,
                    f.art
                        .map(|a| format!("{a:.2} s"))
                        .unwrap_or_else(|| "-".into()),
                    f.n_dips
                ),
                None => println!("  no boundary excursions"),
            }
        } else if let Some(m) = &report.milling {
            println!(
                "  MRE {:.3} m, sigma {:.4} m, mu {:.4} m, mean radius {:.3} m, settle {}",
                m.mre,
                m.precision,
                m.accuracy,
                m.r_mean,
                m.settle_time
                    .map(|t| format!("{t:.1} s"))
                    .unwrap_or_else(|| "never".into())
            );
        }
    }
    Ok(())
}

pub fn cmd_replay(dir: &Path) -> Result<()> {
    let log = RunLog::load(dir).with_context(|| format!("loading {}", dir.display()))?;
    match replay(&log) {
        Ok(_) => {
            println!("replay of {} is exact", dir.display());
            Ok(())
        }
        Err(e) => bail!("replay failed: {e}"),
    }
}
