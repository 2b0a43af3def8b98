use std::path::Path;
use std::process::{Command, Output};

use vdp_core::cli::{parse_args, Task, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
use vdp_core::io::{read_records_csv, RECORD_COLUMNS};
use vdp_core::sweep::{Axis, DimPolicy, SweepConfig};

fn vdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdp"))
        .args(args)
        .env_remove("VDP_THREADS")
        .output()
        .expect("spawn vdp")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn small_sweep_args(out: &Path) -> Vec<String> {
    [
        "sweep",
        "--drive-values",
        "0,5,10",
        "--detuning-values",
        "-2,0,2",
        "--kappa2-values",
        "1000",
        "--dim",
        "12",
        "--out",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain([out.display().to_string()])
    .collect()
}

#[test]
fn steady_example_parses_with_auto_dim() {
    let c = parse_args(["vdp", "steady", "-F", "1", "-D", "2", "--kappa2", "1000"]).unwrap();
    match c.task {
        Task::Steady { params, .. } => {
            assert_eq!((params.drive, params.detuning, params.kappa2, params.kappa1), (1.0, 2.0, 1000.0, 1.0));
            assert_eq!(params.dim, vdp_core::liouvillian::auto_dim(1.0, 1.0, 1000.0).unwrap());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    let cfg = SweepConfig::new(
        Axis::linspace(0.0, 2.0, 3),
        Axis::Values(vec![1.0]),
        vec![10.0],
        DimPolicy::Auto,
    );
    std::fs::write(&path, cfg.to_json()).unwrap();
    let p = path.to_str().unwrap();
    let c = parse_args(["vdp", "sweep", "--config", p]).unwrap();
    match c.task {
        Task::Sweep { config, .. } => assert_eq!(config, cfg),
        other => panic!("{other:?}"),
    }
    let c = parse_args(["vdp", "sweep", "--config", p, "--kappa1", "2", "--dim", "9"]).unwrap();
    match c.task {
        Task::Sweep { config, .. } => {
            assert_eq!(config.kappa1, 2.0);
            assert_eq!(config.dim_policy, DimPolicy::Fixed(9));
            assert_eq!(config.drive_values, cfg.drive_values);
        }
        other => panic!("{other:?}"),
    }

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, cfg.to_json().replace("\"version\": 1", "\"version\": 99")).unwrap();
    assert_eq!(code(&vdp(&["sweep", "--config", bad.to_str().unwrap()])), EXIT_USAGE);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["steady", "-F", "abc"][..],
        &["steady", "-F", "1"],
        &["steady", "--kappa2", "1", "--no-such-flag"],
        &["tomogram", "--kappa2", "1", "--x-range", "3"],
        &["sweep", "--preset", "fig9"],
    ] {
        let o = vdp(args);
        assert_eq!(code(&o), EXIT_USAGE, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn sweep_writes_records_maps_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let mut args = small_sweep_args(&out);
    args.extend(["--metrics".into(), "delta,g2".into()]);
    let o = vdp(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));

    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert_eq!(text.lines().next().unwrap(), RECORD_COLUMNS.join(","));
    let rows = read_records_csv(&out).unwrap();
    assert!(rows.iter().all(|r| r.dim == 12 && r.delta.is_some()));

    for tag in ["delta", "g2"] {
        let map = std::fs::read_to_string(dir.path().join(format!("run.{tag}.csv"))).unwrap();
        assert_eq!(map.lines().count(), 10);
    }
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["tasks"], 9);
    assert!(meta["config_hash"].as_str().unwrap().len() == 64);
    assert!(dir.path().join("run.log.jsonl").exists());
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("t{threads}.csv"));
        let mut args = small_sweep_args(&out);
        args.extend(["--threads".into(), threads.into()]);
        let o = vdp(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code(&o), EXIT_OK);
        texts.push(std::fs::read_to_string(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn threads_env_fallback() {
    let o = Command::new(env!("CARGO_BIN_EXE_vdp"))
        .args(["sweep", "--drive-values", "0", "--detuning-values", "0", "--kappa2-values", "10"])
        .env("VDP_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), EXIT_OK);
    assert!(String::from_utf8_lossy(&o.stderr).contains("on 3 threads"));
}

#[test]
fn unwritable_output_exits_1_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("no_such_dir").join("rho.csv");
    let o = vdp(&["steady", "--kappa2", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_FAILURE);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no_such_dir"));
}

#[test]
fn single_point_commands() {
    let o = vdp(&["steady", "-F", "1", "-D", "-2", "--kappa2", "1000"]);
    assert_eq!(code(&o), EXIT_OK);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 1 + 12 * 12);

    let o = vdp(&["tomogram", "--preset", "fig3c", "--nx", "161", "--ntheta", "8", "--format", "json"]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 161 * 8);

    let o = vdp(&["wigner", "--preset", "fig3d", "--nx", "21", "--x-range", "-6,6"]);
    assert_eq!(code(&o), EXIT_OK);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 1 + 21 * 21);

    // the limit-cycle state needs more room than a 2-wide window
    let o = vdp(&["wigner", "-F", "0", "--kappa2", "1000", "--x-range", "-1,1"]);
    assert_eq!(code(&o), EXIT_FAILURE);

    let o = vdp(&["metrics", "-F", "10", "--kappa2", "1000"]);
    assert_eq!(code(&o), EXIT_OK);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().nth(1).unwrap().ends_with(",antibunched"));
}

#[test]
fn analytic_preset_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig6b.json");
    let o = vdp(&["sweep", "--preset", "fig6b", "--out", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), EXIT_OK);
    let map: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig6b.mean_n.json")).unwrap()).unwrap();
    assert_eq!(map.len(), 51 * 51);
}

#[test]
fn validate_reports_tolerances_and_status() {
    let o = vdp(&["validate", "--only", "1,12"]);
    assert_eq!(code(&o), EXIT_OK);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.starts_with("[PASS]") && l.contains("(<= ")));

    let o = vdp(&["validate", "--only", "13"]);
    assert_eq!(code(&o), EXIT_FAILURE);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("[FAIL] 13"));

    assert_eq!(code(&vdp(&["validate", "--only", "99"])), EXIT_USAGE);
}
