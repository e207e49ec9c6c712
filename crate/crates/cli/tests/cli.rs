use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hybrid-lfc"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

#[test]
fn simulate_writes_outputs() {
    let out = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["simulate", "--scenario"])
        .arg(scenario("two_load.toml"))
        .arg("--out")
        .arg(out.path())
        .args(["--t-end", "20"])
        .output()
        .map(|o| o.status)
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = fs::read_to_string(out.path().join("timeseries.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,delta_f_hz,p_wind_kw,p_diesel_kw,p_load_kw,p_reserve_kw,u_pi"
    );
    assert_eq!(lines.count(), 201);
    assert!(out.path().join("summary.txt").exists());
    assert!(out.path().join("plot.gp").exists());
}

#[test]
fn simulate_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let status = bin()
            .args(["simulate", "--scenario"])
            .arg(scenario("step_306.toml"))
            .arg("--out")
            .arg(dir.path())
            .output()
            .map(|o| o.status)
            .unwrap();
        assert!(status.success());
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("timeseries.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn validate_exit_codes() {
    let ok = bin()
        .args(["validate", "--scenario"])
        .arg(scenario("two_load.toml"))
        .output()
        .unwrap()
        .status;
    assert_eq!(ok.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let over = dir.path().join("over.toml");
    fs::write(
        &over,
        "[[load]]\nstart_s = 0.0\nload_kw = 295.0\n[[load]]\nstart_s = 5.0\nload_kw = 400.0\n",
    )
    .unwrap();
    let out = bin()
        .args(["validate", "--scenario"])
        .arg(&over)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("load[1].load_kw"));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[grid\n").unwrap();
    let out = bin()
        .args(["validate", "--scenario"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn runaway_exits_with_fault_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("runaway.toml");
    fs::write(
        &path,
        r#"
[controller]
kp = 0.0
ki = 0.0
r = 1e9
[wind]
freq_band_hz = 1e6
[grid]
inertia_h_s = 0.05
damping_mw_per_hz = 0.0
[[load]]
start_s = 0.0
load_kw = 295.0
[[load]]
start_s = 1.0
load_kw = 306.0
"#,
    )
    .unwrap();
    let out = bin()
        .args(["simulate", "--scenario"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("simulation fault at t ="));
}

#[test]
fn tune_minimal_run_is_repeatable() {
    let run = |dir: &tempfile::TempDir| {
        let status = bin()
            .args(["tune", "--scenario"])
            .arg(scenario("step_295.toml"))
            .args(["--seed", "11", "--pop", "2", "--iters", "1", "--out"])
            .arg(dir.path())
            .output()
            .map(|o| o.status)
            .unwrap();
        assert!(status.success());
        (
            fs::read_to_string(dir.path().join("convergence.csv")).unwrap(),
            fs::read_to_string(dir.path().join("tune.txt")).unwrap(),
        )
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (conv, report) = run(&a);
    assert_eq!(conv.lines().count(), 2);
    assert!(conv.starts_with("iteration,best_cost\n1,"));
    assert_eq!((conv, report), run(&b));
}

#[test]
fn simulate_tunes_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("auto.toml");
    fs::write(
        &path,
        "controller = \"tune\"\n[solver]\nt_end_s = 20.0\n[pso]\npopulation = 4\niterations = 2\n[[load]]\nstart_s = 0.0\nload_kw = 295.0\n[[load]]\nstart_s = 5.0\nload_kw = 306.0\nwind_pcmd_kw = 276.0\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["simulate", "--scenario"])
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .output()
        .map(|o| o.status)
        .unwrap();
    assert!(status.success());
    assert!(out.join("convergence.csv").exists());
    assert!(out.join("timeseries.csv").exists());
}
