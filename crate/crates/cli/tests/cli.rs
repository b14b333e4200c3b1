//! End-to-end tests of the `auvsim` binary: run/metrics/replay round trips,
//! deterministic outputs, and the documented exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn auvsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_auvsim"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("auvsim-cli-{tag}-{}", std::process::id()));
    std::fs::remove_dir_all(&dir).ok();
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_scenario(dir: &Path) -> PathBuf {
    let path = dir.join("fencing_circle2.toml");
    std::fs::write(
        &path,
        r#"
[scenario]
duration = 60.0
n_agents = 1
seed = 3

[shape]
kind = "circle"
radius = 2.0
"#,
    )
    .unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort();
    entries
}

#[test]
fn run_is_byte_deterministic_under_fixed_seed() {
    let dir = tmp_dir("det");
    let cfg = write_scenario(&dir);
    let (a, b) = (dir.join("a"), dir.join("b"));
    run_ok(auvsim().args(["run"]).arg(&cfg).arg("--out").arg(&a).args(["--seed", "7"]));
    run_ok(auvsim().args(["run"]).arg(&cfg).arg("--out").arg(&b).args(["--seed", "7"]));
    assert_eq!(dir_bytes(&a), dir_bytes(&b));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn agents_override_produces_per_agent_files() {
    let dir = tmp_dir("agents");
    let cfg = write_scenario(&dir);
    let out = dir.join("three");
    run_ok(auvsim().args(["run"]).arg(&cfg).arg("--out").arg(&out).args(["--agents", "3"]));
    for id in 0..3 {
        assert!(out.join(format!("agent_{id:02}.traj.csv")).exists());
    }
    assert!(out.join("metrics.json").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_shape_key_fails_with_diagnostic() {
    let dir = tmp_dir("badcfg");
    let path = dir.join("broken.toml");
    std::fs::write(&path, "[scenario]\nduration = 10.0\n").unwrap();
    let out = auvsim().args(["run"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("shape"), "stderr: {stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn metrics_and_replay_round_trip() {
    let dir = tmp_dir("metrics");
    let cfg = write_scenario(&dir);
    let out = dir.join("run");
    run_ok(auvsim().args(["run"]).arg(&cfg).arg("--out").arg(&out));

    let m = run_ok(auvsim().args(["metrics"]).arg(&out));
    let stdout = String::from_utf8_lossy(&m.stdout);
    assert!(stdout.contains("MRE"), "stdout: {stdout}");

    let t = run_ok(auvsim().args(["metrics"]).arg(&out).arg("--table"));
    let stdout = String::from_utf8_lossy(&t.stdout);
    assert!(stdout.lines().count() >= 2, "stdout: {stdout}");
    assert!(stdout.contains("MRE_m"), "stdout: {stdout}");

    let j = run_ok(auvsim().args(["metrics"]).arg(&out).args(["--json", "--measured"]));
    let stdout = String::from_utf8_lossy(&j.stdout);
    serde_json::from_str::<serde_json::Value>(stdout.lines().next().unwrap()).unwrap();

    let r = run_ok(auvsim().args(["replay"]).arg(&out));
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.contains("exact"), "stdout: {stdout}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn tampered_run_directory_fails_replay() {
    let dir = tmp_dir("tamper");
    let cfg = write_scenario(&dir);
    let out = dir.join("run");
    run_ok(auvsim().args(["run"]).arg(&cfg).arg("--out").arg(&out));
    let cmd_file = out.join("agent_00.commands.csv");
    let mut text = std::fs::read_to_string(&cmd_file).unwrap();
    text.push_str("59.0,0.5\n");
    std::fs::write(&cmd_file, text).unwrap();
    let r = auvsim().args(["replay"]).arg(&out).output().unwrap();
    assert_eq!(r.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_campaign_lists_valid_names_with_usage_exit() {
    let out = auvsim().args(["campaign", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    for name in ["fencing_heb", "fencing_rvb", "milling_heb", "milling_rvb"] {
        assert!(stderr.contains(name), "stderr: {stderr}");
    }
}

#[test]
fn short_campaign_writes_summary_and_run_dirs() {
    let dir = tmp_dir("campaign");
    let out = run_ok(
        auvsim()
            .args(["campaign", "milling_rvb"])
            .arg("--out")
            .arg(&dir)
            .args(["--duration", "60", "--seed", "5"]),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("circle2_n3"), "stdout: {stdout}");
    assert!(dir.join("summary.tsv").exists());
    assert!(dir.join("circle30_n3").join("manifest.toml").exists());
    assert!(dir.join("circle2_n3").join("agent_02.traj.csv").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn usage_error_exits_two() {
    let out = auvsim().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn env_var_sets_default_output_root() {
    let dir = tmp_dir("envroot");
    let cfg = write_scenario(&dir);
    run_ok(auvsim().args(["run"]).arg(&cfg).env("AUVSIM_OUT", &dir));
    assert!(dir.join("fencing_circle2").join("manifest.toml").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn shipped_scenarios_resolve_and_run_briefly() {
    let scenarios = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut seen = 0;
    for entry in std::fs::read_dir(&scenarios).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        seen += 1;
        let dir = tmp_dir(&format!(
            "ship-{}",
            path.file_stem().unwrap().to_string_lossy()
        ));
        run_ok(
            auvsim()
                .args(["run"])
                .arg(&path)
                .arg("--out")
                .arg(dir.join("out"))
                .args(["--duration", "10"]),
        );
        std::fs::remove_dir_all(&dir).ok();
    }
    assert!(seen >= 7, "expected shipped scenarios, found {seen}");
}
