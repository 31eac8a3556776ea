//! CLI contract tests: exit codes, structured error output, and file schemas.

use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_vortex-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn mp_json() -> serde_json::Value {
    serde_json::json!({
        "type": "bimatrix",
        "A": [[1.0, 0.0], [0.0, 1.0]],
        "B": [[-1.0, 0.0], [0.0, -1.0]],
    })
}

fn error_kind(output: &std::process::Output) -> String {
    let stderr = String::from_utf8_lossy(&output.stderr);
    let line = stderr
        .lines()
        .find(|l| l.starts_with('{'))
        .unwrap_or_else(|| panic!("no JSON error line in stderr: {stderr}"));
    let v: serde_json::Value = serde_json::from_str(line).expect("stderr JSON parses");
    v["error"]["kind"].as_str().expect("kind field").to_string()
}

fn first_line(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

#[test]
fn oversized_step_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sim.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "game": mp_json(),
            "schedule": {"kind": "constant", "eps": 0.3},
            "horizon": 10,
            "initial": {"kind": "point", "blocks": [[0.0, 0.0], [0.0, 0.0]]},
        })
        .to_string(),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(error_kind(&res), "config");
    // Failed runs must not leave partial output files behind.
    assert!(!out.join("trajectory.csv").exists());
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn zero_radius_cloud_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("lyap.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "game": mp_json(),
            "start": [[0.5, 0.0], [0.2, 0.0]],
            "radius": 0.0,
            "eps_list": [0.1],
        })
        .to_string(),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = run(&["lyapunov", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(error_kind(&res), "config");
}

#[test]
fn missing_config_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let res = run(&[
        "simulate",
        "--config",
        tmp.path().join("nope.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(error_kind(&res), "config");
}

#[test]
fn malformed_config_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, "{ not json").unwrap();
    let out = tmp.path().join("out");
    let res = run(&["coeff", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(error_kind(&res), "config");
}

#[test]
fn boundary_requires_constant_schedule() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("vol.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "game": mp_json(),
            "schedule": {"kind": "diminishing", "c0": 0.05, "c1": 100.0},
            "horizon": 10,
            "initial": {"kind": "grid", "center": [0.0, 0.0], "radius": 0.05, "resolution": 3},
            "snapshot_times": [0, 10],
            "boundary": {"vol0": 1e-4, "delta": 0.1, "gamma": 0.1},
        })
        .to_string(),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = run(&["volume", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn simulate_outputs_follow_the_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sim.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "game": mp_json(),
            "schedule": {"kind": "constant", "eps": 0.1},
            "horizon": 50,
            "initial": {"kind": "point", "blocks": [[0.3, 0.0], [0.1, 0.0]]},
            "stride": 5,
        })
        .to_string(),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{res:?}");
    assert_eq!(first_line(&out.join("trajectory.csv")), "t,side,index,dual,primal");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert!(manifest["version"].is_string());
    assert!(manifest.get("config").is_some());
    // 11 recorded times (0, 5, ..., 50) x 4 coordinates + header.
    let lines = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(lines.lines().count(), 1 + 11 * 4);
}

#[test]
fn rps_table_matches_the_reference_levels() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let res = run(&["rps-table", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{res:?}");
    let text = std::fs::read_to_string(out.join("rps_table.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "r,threshold");
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let mut it = l.split(',');
            (
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(rows.len(), 9);
    for (r, v) in &rows {
        let expect = vortex_lab::analysis::rps_threshold(*r);
        assert!((v - expect).abs() <= 1e-15);
    }
}

#[test]
fn coeff_reports_thresholds_and_growth_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("coeff.json");
    std::fs::write(
        &cfg,
        serde_json::json!({ "game": mp_json(), "deltas": [0.1] }).to_string(),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = run(&["coeff", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{res:?}");
    assert_eq!(first_line(&out.join("thresholds.csv")), "delta,eps_threshold,growth_bound");
    let coeff: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("coeff.json")).unwrap()).unwrap();
    assert!((coeff["second_order_coeff"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((coeff["triviality_gap"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(coeff["trivial"], false);
}

#[test]
fn trivial_game_coeff_carries_a_warning_note() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("coeff.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "game": {
                "type": "bimatrix",
                "A": [[0.3, -0.2], [0.3, -0.2]],
                "B": [[-0.3, 0.2], [-0.3, 0.2]],
            },
            "deltas": [0.1],
        })
        .to_string(),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = run(&["coeff", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{res:?}");
    let coeff: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("coeff.json")).unwrap()).unwrap();
    assert_eq!(coeff["trivial"], true);
    assert!(coeff["note"].as_str().unwrap().contains("trivial"));
}

#[test]
fn volume_emits_snapshots_hull_and_boundary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("vol.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "game": mp_json(),
            "schedule": {"kind": "constant", "eps": 0.1},
            "horizon": 60,
            "initial": {"kind": "grid", "center": [0.0, 0.0], "radius": 0.05, "resolution": 5},
            "snapshot_times": [0, 30, 60],
            "boundary": {"vol0": 1e-4, "delta": 0.1, "gamma": 0.1},
        })
        .to_string(),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = run(&["volume", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{res:?}");
    for t in [0u64, 30, 60] {
        assert!(out.join(format!("snapshot_{t:06}.csv")).exists());
    }
    assert_eq!(
        first_line(&out.join("hull.csv")),
        "snapshot_t,hull_area,min_multiplier,max_multiplier,mean_multiplier"
    );
    assert_eq!(first_line(&out.join("multipliers.csv")), "point_id,multiplier");
    assert_eq!(first_line(&out.join("boundary.csv")), "t_star,lhs_log,rhs_log");
    // Every accumulated multiplier is strictly positive and above 1 here
    // (the cloud sits inside the expanding region for this short horizon).
    for line in std::fs::read_to_string(out.join("multipliers.csv"))
        .unwrap()
        .lines()
        .skip(1)
    {
        let m: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(m > 1.0, "multiplier {m}");
    }
}

#[test]
fn lyapunov_reports_divergence_times_and_ratios() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("lyap.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "game": mp_json(),
            "start": [[0.5, 0.0], [0.2, 0.0]],
            "radius": 1e-6,
            "eps_list": [0.1, 0.05],
            "horizon": 200000,
        })
        .to_string(),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = run(&["lyapunov", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{res:?}");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let entries = summary["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    for e in entries {
        assert!(e["time"].as_u64().unwrap() > 0);
    }
    let ratios = summary["time_ratios"].as_array().unwrap();
    assert_eq!(ratios.len(), 1);
    assert!(ratios[0].as_f64().unwrap() > 1.0);
    assert_eq!(first_line(&out.join("divergence_0.csv")), "t,max_distance");
    assert_eq!(first_line(&out.join("divergence_1.csv")), "t,max_distance");
}

#[test]
fn ftrl_simulation_runs_from_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sim.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "game": mp_json(),
            "dynamic": {"kind": "ftrl", "regs": [
                {"kind": "entropy"},
                {"kind": "quadratic_log", "lambda": 0.1},
            ]},
            "schedule": {"kind": "constant", "eps": 0.05},
            "horizon": 20,
            "initial": {"kind": "point", "blocks": [[0.2, 0.0], [0.0, 0.0]]},
        })
        .to_string(),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{res:?}");
    assert!(out.join("trajectory.csv").exists());
}

#[test]
fn non_steep_regularizer_is_rejected_for_dynamics() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sim.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "game": mp_json(),
            "dynamic": {"kind": "ftrl", "regs": [
                {"kind": "quadratic"},
                {"kind": "entropy"},
            ]},
            "schedule": {"kind": "constant", "eps": 0.05},
            "horizon": 20,
            "initial": {"kind": "point", "blocks": [[0.2, 0.0], [0.0, 0.0]]},
        })
        .to_string(),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn rps_config_game_is_supported_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("coeff.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "game": {"type": "rps", "P": 1.0, "Q": 0.5, "normalize": true},
            "deltas": [0.1],
        })
        .to_string(),
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = run(&["coeff", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{res:?}");
    let coeff: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("coeff.json")).unwrap()).unwrap();
    assert_eq!(coeff["trivial"], false);
}
