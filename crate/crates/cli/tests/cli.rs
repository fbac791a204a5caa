use std::fs;
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::thread;
use std::time::Duration;

use serde_json::Value;
use tempfile::TempDir;

fn qcoin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcoin"))
        .args(args)
        .output()
        .expect("spawn qcoin")
}

fn ok_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "status {:?}, stderr {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn err_json(out: &Output) -> Value {
    assert!(!out.status.success());
    serde_json::from_slice(&out.stderr).expect("stderr is a JSON error object")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn rate(report: &Value, name: &str) -> f64 {
    report["rates"][name]["value"].as_f64().unwrap()
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

#[test]
fn calibrate_solves_visibility() {
    let v = ok_json(&qcoin(&["calibrate", "--failure-rate", "0.06"]));
    assert!((v["visibility"].as_f64().unwrap() - 0.91).abs() < 1e-12);
    let v = ok_json(&qcoin(&["calibrate", "--failure-rate", "0"]));
    assert_eq!(v["visibility"].as_f64().unwrap(), 1.0);
    let out = qcoin(&["calibrate", "--failure-rate", "0.7"]);
    assert_eq!(out.status.code(), Some(2));
    let e = err_json(&out);
    assert_eq!(e["error"]["field"], "failure_rate");
}

#[test]
fn optimize_reaches_the_ceiling() {
    let v = ok_json(&qcoin(&["optimize", "--seed", "3"]));
    let w = v["win_prob"].as_f64().unwrap();
    assert!((w - 0.75).abs() <= 1e-4, "{w}");
    assert_eq!(v["state"].as_array().unwrap().len(), 3);
}

#[test]
fn honest_calibrated_run_reports_six_percent() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    ok_json(&qcoin(&[
        "run", "--throws", "20000", "--seed", "4", "--visibility", "0.91", "--out", out.to_str().unwrap(),
    ]));
    let r = report(&out);
    assert!((rate(&r, "failures") - 0.06).abs() < 0.006, "{}", rate(&r, "failures"));
    assert_eq!(r["verdicts"]["honesty"]["verdict"], "honest");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["seed"], 4);
    let throws = fs::read_to_string(out.join("throws.csv")).unwrap();
    let mut lines = throws.lines();
    assert_eq!(lines.next(), Some("index,throw_id,verdict,coin"));
    assert_eq!(lines.count(), 20_000);
    let stats = fs::read_to_string(out.join("stats.csv")).unwrap();
    assert!(stats.starts_with("metric,count,n,rate,lo,hi\n"));
    assert!(out.join("transcript.jsonl").exists());
}

#[test]
fn mixture_run_wins_five_eighths() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("mix");
    ok_json(&qcoin(&["run", "--throws", "20000", "--alice", "mixture", "--out", out.to_str().unwrap()]));
    let r = report(&out);
    assert!((rate(&r, "alice_win") - 0.625).abs() < 0.011);
    assert_eq!(r["verdicts"]["honesty"]["verdict"], "cheating");
    let est = &r["verdicts"]["honesty"]["estimated_cheat_fraction"];
    assert!(est["lo"].as_f64().unwrap() <= 1.0 && est["hi"].as_f64().unwrap() >= 0.9);
}

#[test]
fn identical_configs_give_identical_files() {
    let tmp = TempDir::new().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    let args = |dir: &Path| {
        vec![
            "run".to_string(), "--throws".into(), "3000".into(), "--seed".into(), "9".into(),
            "--alice".into(), "mixture".into(), "--cheat-fraction".into(), "0.4".into(),
            "--bob".into(), "deny-loss".into(), "--deny-prob".into(), "0.2".into(),
            "--visibility".into(), "0.93".into(), "--out".into(), dir.to_str().unwrap().into(),
        ]
    };
    for dir in [&a, &b] {
        let argv = args(dir);
        ok_json(&qcoin(&argv.iter().map(String::as_str).collect::<Vec<_>>()));
    }
    // the config embedded in report.json replays the same run
    let cfg = a.join("report.json");
    ok_json(&qcoin(&["run", "--config", cfg.to_str().unwrap(), "--out", c.to_str().unwrap()]));
    for file in ["report.json", "stats.csv", "throws.csv", "transcript.jsonl"] {
        let first = fs::read(a.join(file)).unwrap();
        assert_eq!(first, fs::read(b.join(file)).unwrap(), "{file}");
        assert_eq!(first, fs::read(c.join(file)).unwrap(), "{file} (replayed)");
    }
}

#[test]
fn flags_override_the_config_file() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"throws": 400, "seed": 1, "noise": {"visibility": 0.8, "detector_efficiency": [1,1,1,1,1,1]},
            "strategies": {"alice": {"kind": "mixture_cheat", "weight": 0.5, "coherence": 0.0},
                           "bob": {"kind": "honest"}}}"#,
    )
    .unwrap();
    let out = tmp.path().join("o");
    ok_json(&qcoin(&[
        "run", "--config", cfg.to_str().unwrap(), "--throws", "250", "--mixture-weight", "0.3",
        "--out", out.to_str().unwrap(),
    ]));
    let r = report(&out);
    assert_eq!(r["config"]["throws"], 250);
    assert_eq!(r["config"]["noise"]["visibility"], 0.8);
    assert_eq!(r["config"]["strategies"]["alice"]["weight"], 0.3);
    assert_eq!(r["stats"]["n_throws"], 250);
}

#[test]
fn invalid_config_names_the_field() {
    let out = qcoin(&["run", "--visibility", "1.5", "--out", "/nonexistent/never"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(err_json(&out)["error"]["field"], "noise");

    let out = qcoin(&["run", "--bob", "honest", "--deny-prob", "0.5"]);
    assert_eq!(err_json(&out)["error"]["field"], "deny_prob");

    let out = qcoin(&["run", "--throws", "0"]);
    assert_eq!(err_json(&out)["error"]["field"], "throws");

    let out = qcoin(&["run", "--role", "alice"]);
    assert_eq!(err_json(&out)["error"]["field"], "role");

    let out = qcoin(&["run", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(err_json(&out)["error"]["kind"], "usage");
}

#[test]
fn sweep_emits_the_curve() {
    let out = qcoin(&["sweep", "--throws", "2000", "--visibility", "0.91", "--seed", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,n,failures,rate,lo,hi"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[5][0], 0.5);
    assert!(rows[10][3] > rows[0][3]);

    let out = qcoin(&["sweep", "--alice", "honest"]);
    assert_eq!(err_json(&out)["error"]["field"], "alice");
}

#[test]
fn two_processes_over_loopback() {
    let tmp = TempDir::new().unwrap();
    let port = free_port().to_string();
    let endpoint = format!("127.0.0.1:{port}");
    let common = ["run", "--throws", "1000", "--seed", "12", "--visibility", "0.91", "--alice", "mixture"];
    let bob_out = tmp.path().join("bob");
    let mut bob = Command::new(env!("CARGO_BIN_EXE_qcoin"))
        .args(common)
        .args(["--role", "bob", "--listen", &endpoint, "--out", bob_out.to_str().unwrap()])
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    let alice_out = tmp.path().join("alice");
    let mut alice_args = common.to_vec();
    alice_args.extend(["--role", "alice", "--connect", &endpoint, "--out", alice_out.to_str().unwrap()]);
    ok_json(&qcoin(&alice_args));
    assert!(bob.wait().unwrap().success());

    let local_out = tmp.path().join("local");
    let mut local_args = common.to_vec();
    local_args.extend(["--out", local_out.to_str().unwrap()]);
    ok_json(&qcoin(&local_args));

    let local = fs::read(local_out.join("transcript.jsonl")).unwrap();
    assert_eq!(local, fs::read(alice_out.join("transcript.jsonl")).unwrap());
    assert_eq!(local, fs::read(bob_out.join("transcript.jsonl")).unwrap());
    assert_eq!(report(&local_out)["stats"], report(&alice_out)["stats"]);
}

#[test]
fn killed_bob_process_aborts_alice() {
    let port = free_port().to_string();
    let endpoint = format!("127.0.0.1:{port}");
    let tmp = TempDir::new().unwrap();
    let mut bob = Command::new(env!("CARGO_BIN_EXE_qcoin"))
        .args(["run", "--throws", "100000000", "--role", "bob", "--listen", &endpoint])
        .args(["--out", tmp.path().join("b").to_str().unwrap()])
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    let alice = Command::new(env!("CARGO_BIN_EXE_qcoin"))
        .args(["run", "--throws", "100000000", "--role", "alice", "--connect", &endpoint])
        .args(["--out", tmp.path().join("a").to_str().unwrap()])
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    thread::sleep(Duration::from_millis(500));
    bob.kill().unwrap();
    bob.wait().unwrap();
    let out = alice.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "counterpart_disconnected", "{e}");
    assert!(e["error"]["message"].as_str().unwrap().contains("counterpart disconnected"));
    assert!(e["error"]["records"].as_u64().unwrap() > 0);
}

#[test]
fn list_flags_take_comma_separated_values() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("eff");
    ok_json(&qcoin(&[
        "run", "--throws", "50", "--efficiencies", "0.9,0.8,0.7,0.9,0.8,0.7", "--alice", "optimal",
        "--optimal-state", "2,-1,1", "--out", out.to_str().unwrap(),
    ]));
    let r = report(&out);
    assert_eq!(r["config"]["noise"]["detector_efficiency"][2], 0.7);

    let bad = qcoin(&["run", "--efficiencies", "0.9,0.9"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(err_json(&bad)["error"]["field"], "efficiencies");
    let bad = qcoin(&["run", "--alice", "optimal", "--optimal-state", "1,1"]);
    assert_eq!(err_json(&bad)["error"]["field"], "optimal_state");
}
