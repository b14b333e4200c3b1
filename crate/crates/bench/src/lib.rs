//! Benchmark-only crate; see `benches/sim.rs`.

/// Scenario TOML used by the end-to-end benchmarks.
pub fn bench_scenario(mode: &str, n_agents: usize, duration: f64) -> String {
    format!(
        r#"
[scenario]
duration = {duration}
n_agents = {n_agents}
seed = 7

[shape]
kind = "star"
radius = 30.0
concave = 10.0

[behavior]
mode = "{mode}"
direction = "cw"
k = 20.0
k_rate = 0.0
delta_psi = 20.0
window_len = 5
heading_update_dt = 1.0
fx = 0.5
in_boundary = "hold_heading"
"#
    )
}
