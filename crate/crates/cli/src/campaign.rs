//! Predefined simulation campaigns: the fencing and milling sweeps over
//! agent counts and boundary shapes, executed on a worker pool of
//! independent single-threaded runs.

use crate::table;
use anyhow::{Context, Result};
use auvsim_core::scenario::{run, ScenarioFile};
use rayon::prelude::*;
use std::path::PathBuf;

pub const CAMPAIGN_NAMES: [&str; 4] =
    ["fencing_heb", "fencing_rvb", "milling_heb", "milling_rvb"];

struct CampaignRun {
    name: String,
    file: ScenarioFile,
}

fn scenario(mode: &str, shape: &str, n: usize, fx: f64, seed: u64, duration: f64) -> ScenarioFile {
    let shape_section = match shape {
        "circle30" => "kind = \"circle\"\nradius = 30.0",
        "circle2" => "kind = \"circle\"\nradius = 2.0",
        "square60" => "kind = \"square\"\nside = 60.0",
        "star30" => "kind = \"star\"\nradius = 30.0\nconcave = 10.0",
        other => unreachable!("unknown campaign shape {other}"),
    };
    let toml = format!(
        r#"
[scenario]
duration = {duration}
n_agents = {n}
seed = {seed}

[shape]
{shape_section}

[behavior]
mode = "{mode}"
direction = "cw"
k = 20.0
k_rate = 0.0
delta_psi = 20.0
window_len = 5
heading_update_dt = 1.0
fx = {fx}
in_boundary = "hold_heading"
"#
    );
    ScenarioFile::from_toml_str(&toml).expect("campaign scenario parses")
}

fn runs_for(name: &str, seed: u64, duration: f64) -> Vec<CampaignRun> {
    let mut runs = Vec::new();
    let mut push = |label: String, mode: &str, shape: &str, n: usize| {
        runs.push(CampaignRun {
            name: label,
            file: scenario(mode, shape, n, 0.5, seed, duration),
        });
    };
    match name {
        "fencing_heb" => {
            for n in [1, 2, 3] {
                push(format!("circle30_n{n}"), "heb_fence", "circle30", n);
            }
            push("square60_n3".into(), "heb_fence", "square60", 3);
            push("star30_n3".into(), "heb_fence", "star30", 3);
        }
        "fencing_rvb" => {
            for n in [1, 2, 3] {
                push(format!("circle30_n{n}"), "rvb_fence", "circle30", n);
            }
        }
        "milling_heb" => {
            for n in [1, 2, 3] {
                push(format!("circle30_n{n}"), "heb_mill", "circle30", n);
            }
            push("square60_n3".into(), "heb_mill", "square60", 3);
            push("star30_n3".into(), "heb_mill", "star30", 3);
        }
        "milling_rvb" => {
            push("circle30_n3".into(), "rvb_mill", "circle30", 3);
            push("circle2_n3".into(), "rvb_mill", "circle2", 3);
        }
        other => unreachable!("unknown campaign {other}"),
    }
    runs
}

pub fn cmd_campaign(
    name: &str,
    out: Option<PathBuf>,
    seed: Option<u64>,
    duration: Option<f64>,
) -> Result<()> {
    let seed = seed.unwrap_or(7);
    let duration = duration.unwrap_or(1000.0);
    let out_root = out.unwrap_or_else(|| crate::out_root().join(name));
    let runs = runs_for(name, seed, duration);

    let results: Vec<Result<(String, ScenarioFile, auvsim_core::MetricsReport)>> = runs
        .par_iter()
        .map(|cr| {
            let cfg = cr.file.resolve().context("campaign scenario invalid")?;
            let log = run(&cfg);
            let dir = out_root.join(&cr.name);
            log.save(&dir)
                .with_context(|| format!("writing {}", dir.display()))?;
            let report = log.compute_report().context("metrics")?;
            Ok((cr.name.clone(), cr.file.clone(), report))
        })
        .collect();

    let mut summary = String::new();
    let mut last_header = "";
    for result in results {
        let (run_name, file, report) = result?;
        let header = table::header_for(&file);
        if header != last_header {
            summary.push_str(header);
            summary.push('\n');
            last_header = header;
        }
        summary.push_str(&table::row_for(&run_name, &file, &report));
        summary.push('\n');
    }
    print!("{summary}");
    let summary_path = out_root.join("summary.tsv");
    std::fs::write(&summary_path, &summary)
        .with_context(|| format!("writing {}", summary_path.display()))?;
    println!("campaign `{name}` -> {}", out_root.display());
    Ok(())
}
