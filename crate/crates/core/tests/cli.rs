use std::path::Path;
use std::process::{Command, Output};

use heston_wings::reference::bs_call;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heston-wings"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&full)).unwrap()
}

#[test]
fn tstar_below_the_boundary_is_infinite() {
    assert_eq!(json(&["tstar", "--s", "1"])["tstar"], "+inf");
    assert!(stdout(&["tstar", "--s", "1", "--format", "csv"]).ends_with("1.0,+inf\n"));
}

#[test]
fn deep_in_the_money_call() {
    let v = json(&["price", "--k", "-14"]);
    let price = v["price"].as_f64().unwrap();
    assert!((price - (1.0 - (-14f64).exp())).abs() < 1e-9, "{price}");
}

#[test]
fn impvol_round_trip() {
    let c = bs_call(0.4, 0.27, 1.0).unwrap();
    let v = json(&["impvol", "--k", "0.4", "--price", &c.to_string()]);
    assert!((v["implied_vol"].as_f64().unwrap() - 0.27).abs() < 1e-10);
}

#[test]
fn constants_document() {
    let v = json(&["constants", "--side", "upper"]);
    assert!((v["C3"].as_f64().unwrap() - 33.2124).abs() < 5e-3);
    assert!((v["C2"].as_f64().unwrap() - 12.3533).abs() < 5e-3);
    assert!((v["C1"].as_f64().unwrap() / 2311.69 - 1.0).abs() < 5e-3);
    let lower = json(&["constants", "--side", "lower"]);
    assert!(lower["C3"].as_f64().unwrap() > -1.0);
    assert!(lower["sigma"].as_f64().unwrap() > 0.0);
}

#[test]
fn zero_inflow_power_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.toml");
    std::fs::write(&file, "a = 0\nb = -0.6067\nc = 0.2928\nrho = -0.7571\nv0 = 0.0654\n").unwrap();
    let v = json(&["--params", file.to_str().unwrap(), "constants", "--side", "upper"]);
    assert_eq!(v["power_exp"].as_f64().unwrap(), -0.75);
}

#[test]
fn csv_and_json_agree() {
    let args = ["density", "--logx-grid", "1:9:5", "--asymptotic"];
    let csv = stdout(&[&args[..], &["--format", "csv"]].concat());
    let json = json(&args);
    let rows = json.as_array().unwrap();
    for (line, obj) in csv.lines().skip(1).zip(rows) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[1].parse::<f64>().unwrap(), obj["log_density"].as_f64().unwrap());
        assert_eq!(
            fields[2].parse::<f64>().unwrap(),
            obj["log_asymptotic"].as_f64().unwrap()
        );
    }
}

#[test]
fn smile_table_columns() {
    let out = stdout(&[
        "smile",
        "--k-min",
        "-2",
        "--k-max",
        "2",
        "--points",
        "5",
        "--orders",
        "1,3",
        "--exact",
        "--sqrt-form",
        "--format",
        "csv",
    ]);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "k,exact_vol,order1,order3,sqrt_form");
    let at_the_money: Vec<&str> = out.lines().nth(3).unwrap().split(',').collect();
    assert_eq!(at_the_money[0], "0.0");
    assert!(at_the_money[2].is_empty() && at_the_money[3].is_empty());
}

fn read_all(dir: &Path) -> Vec<Vec<u8>> {
    (1..=5)
        .map(|i| std::fs::read(dir.join(format!("fig{i}.csv"))).unwrap())
        .collect()
}

#[test]
fn figures_are_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    stdout(&["figures", "--out-dir", a.path().to_str().unwrap()]);
    stdout(&["figures", "--out-dir", b.path().to_str().unwrap()]);
    assert_eq!(read_all(a.path()), read_all(b.path()));

    let fig2 = String::from_utf8(read_all(a.path())[1].clone()).unwrap();
    let last: Vec<f64> = fig2
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(last[0], 40.0);
    assert!((last[1] / last[2] - 1.0).abs() < 0.1, "{last:?}");

    let fig5 = String::from_utf8(read_all(a.path())[4].clone()).unwrap();
    assert_eq!(fig5.lines().count(), 42);
    assert!(fig5.lines().any(|l| l.starts_with("0.0,") && l.ends_with(",,")));
}

#[test]
fn failed_figures_leave_no_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "figures",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--logx-grid",
        "-1:5:4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn error_names_and_exit_codes() {
    let cases: [(&[&str], i32, &str); 5] = [
        (&["tstar", "--s", "2", "--maturity", "-1"], 2, "DomainError"),
        (&["price", "--k", "0", "--alpha", "40"], 2, "StripError"),
        (
            &["--params", "/nonexistent/params.toml", "tstar", "--s", "2"],
            4,
            "IoError",
        ),
        (&["impvol", "--k", "0.1", "--price", "1.5"], 2, "ArbitrageError"),
        (&["smile", "--orders", "4"], 2, "DomainError"),
    ];
    for (args, code, name) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with(name), "{args:?}");
    }
}

#[test]
fn mixed_parameter_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.toml");
    std::fs::write(&file, "a = 0.04\nlambda = 0.6\nc = 0.3\nrho = -0.7\nv0 = 0.06\n").unwrap();
    let out = run(&["--params", file.to_str().unwrap(), "tstar", "--s", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("ConfigError"));
}
