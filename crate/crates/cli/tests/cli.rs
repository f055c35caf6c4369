use std::process::{Command, Output};

use serde_json::Value;

fn dasep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dasep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_n22_small_ring_passes() {
    let o = dasep(&["verify", "--suite", "n22", "-n", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS n22_closed_form"));
}

#[test]
fn symbolic_solution_json() {
    let o = dasep(&["stationary", "-n", "3", "-p", "2", "-q", "2", "--symbolic"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["entries"]["011"], "u + 3*t + 4");
    assert_eq!(v["entries"]["022"], "u^3 + 3*u^2*t + 4*u^2");
    assert_eq!(v["normalization"], "gcd_one");
}

#[test]
fn symbolic_json_round_trips() {
    use dasep_core::chains::build_dasep;
    use dasep_core::stationary::{solve_stationary_symbolic, StationaryVector};
    let o = dasep(&["stationary", "-n", "4", "-p", "2", "-q", "2", "--symbolic"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let sys = build_dasep(4, 2, 2).unwrap();
    let parsed = StationaryVector::from_json(&sys, &v).unwrap();
    assert_eq!(parsed, solve_stationary_symbolic(&sys).unwrap());
}

#[test]
fn point_solution_sums_to_one() {
    let o = dasep(&[
        "stationary",
        "-n",
        "3",
        "-p",
        "2",
        "-q",
        "2",
        "--at",
        "1/2",
        "1/3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["entries"]["011"], "4/27");
    assert_eq!(v["mode"], "point");
}

#[test]
fn enumerate_chi_counts_partitions() {
    let o = dasep(&["enumerate", "--space", "chi", "-p", "2", "-q", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = dasep(&[
        "enumerate",
        "--space",
        "gamma",
        "-n",
        "4",
        "-p",
        "2",
        "-q",
        "2",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 24);
}

#[test]
fn usage_errors_exit_two_and_name_the_flag() {
    let o = dasep(&["stationary", "-n", "2", "-p", "2", "-q", "3", "--symbolic"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("-n/-p/-q"));
    let o = dasep(&["simulate", "-n", "3", "-p", "2", "-q", "2", "-u", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--u"));
    let o = dasep(&["enumerate", "--space", "chi", "-p", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("-q"));
    assert_eq!(dasep(&["frobnicate"]).status.code(), Some(2));
    let o = dasep(&["verify", "--suite", "oeis", "--fixtures", "/nonexistent"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_verification_exits_one() {
    let dir = std::env::temp_dir().join(format!("dasep-bad-fixtures-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("A082762.txt"), "1\n9\n").unwrap();
    std::fs::write(dir.join("A084326.txt"), "0\n1\n6\n").unwrap();
    let o = dasep(&[
        "verify",
        "--suite",
        "oeis",
        "--k-max",
        "1",
        "--fixtures",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL oeis_specialization"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn state_cap_env_override() {
    let o = Command::new(env!("CARGO_BIN_EXE_dasep"))
        .args(["stationary", "-n", "4", "-p", "2", "-q", "2", "--symbolic"])
        .env("DASEP_STATE_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("10"));
}

#[test]
fn simulate_outputs_and_out_file() {
    let path = std::env::temp_dir().join(format!("dasep-sim-{}.csv", std::process::id()));
    let o = dasep(&[
        "simulate",
        "-n",
        "3",
        "-p",
        "2",
        "-q",
        "2",
        "--steps",
        "1000",
        "--seed",
        "5",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().next(), Some("state,count,frequency"));
    assert_eq!(csv.lines().count(), 13);
    std::fs::remove_file(&path).ok();

    let args = [
        "simulate", "-n", "3", "-p", "2", "-q", "2", "-u", "1/2", "-t", "1/3", "--steps", "20000",
        "--seed", "9",
    ];
    let a: Value = serde_json::from_slice(&dasep(&args).stdout).unwrap();
    let b: Value = serde_json::from_slice(&dasep(&args).stdout).unwrap();
    assert_eq!(a, b);
    assert!(a["tv_distance"].as_f64().unwrap() < 0.1);
}

#[test]
fn matrix_and_dot() {
    let o = dasep(&["matrix", "--chain", "rrg", "-n", "3", "-p", "2", "-q", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 3);
    assert_eq!(v["scale"], 9);
    let o = dasep(&["dot", "-n", "3", "-p", "1", "-q", "1"]);
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn lumping_suite_on_one_point() {
    let o = dasep(&[
        "verify", "--suite", "lumping", "-n", "4", "-p", "3", "-q", "2", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 1);
}
