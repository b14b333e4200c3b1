//! Tab-delimited comparison rows in the style of per-behavior summary
//! tables: fencing rows carry MRE/MPE/ART, milling rows MRE/sigma/mu.

use auvsim_core::{BehaviorMode, MetricsReport, ScenarioFile};

pub const FENCING_HEADER: &str = "run\tmode\tagents\tfx_N\tMRE_m\tMPE_m\tART_s\tdips";
pub const MILLING_HEADER: &str = "run\tmode\tagents\tfx_N\tMRE_m\tsigma_m\tmu_m\tsettle_s";

pub fn mode_str(mode: BehaviorMode) -> &'static str {
    match mode {
        BehaviorMode::RvbFence => "rvb_fence",
        BehaviorMode::RvbMill => "rvb_mill",
        BehaviorMode::HebFence => "heb_fence",
        BehaviorMode::HebMill => "heb_mill",
    }
}

pub fn is_fencing(mode: BehaviorMode) -> bool {
    matches!(mode, BehaviorMode::RvbFence | BehaviorMode::HebFence)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into())
}

pub fn fencing_row(name: &str, file: &ScenarioFile, report: &MetricsReport) -> String {
    let b = &file.behavior;
    match &report.fencing {
        Some(f) => format!(
            "{name}\t{}\t{}\t{}\t{:.3}\t{:.3}\t{}\t{}",
            mode_str(b.mode),
            file.scenario.n_agents,
            b.fx,
            f.mre,
            f.mpe,
            opt(f.art),
            f.n_dips
        ),
        None => format!(
            "{name}\t{}\t{}\t{}\t-\t-\t-\t0",
            mode_str(b.mode),
            file.scenario.n_agents,
            b.fx
        ),
    }
}

pub fn milling_row(name: &str, file: &ScenarioFile, report: &MetricsReport) -> String {
    let b = &file.behavior;
    match &report.milling {
        Some(m) => format!(
            "{name}\t{}\t{}\t{}\t{:.3}\t{:.4}\t{:.4}\t{}",
            mode_str(b.mode),
            file.scenario.n_agents,
            b.fx,
            m.mre,
            m.precision,
            m.accuracy,
            opt(m.settle_time)
        ),
        None => format!(
            "{name}\t{}\t{}\t{}\t-\t-\t-\t-",
            mode_str(b.mode),
            file.scenario.n_agents,
            b.fx
        ),
    }
}

pub fn row_for(name: &str, file: &ScenarioFile, report: &MetricsReport) -> String {
    if is_fencing(file.behavior.mode) {
        fencing_row(name, file, report)
    } else {
        milling_row(name, file, report)
    }
}

pub fn header_for(file: &ScenarioFile) -> &'static str {
    if is_fencing(file.behavior.mode) {
        FENCING_HEADER
    } else {
        MILLING_HEADER
    }
}
