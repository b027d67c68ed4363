use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rabi-heun"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn quasi_reference_point() {
    let o = run(&[
        "quasi", "--f", "0.5", "--nu", "1.0", "--terms", "100", "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["r"].as_f64().unwrap() + 0.924176).abs() < 1e-5);
    assert!((v["alpha"].as_f64().unwrap() + 1.75978).abs() < 1e-5);
    assert_eq!(v["converged"], Value::Bool(true));
    assert_eq!(v["eta_pp"].as_array().unwrap().len(), 2);
}

#[test]
fn quasi_trivial_points() {
    let v = json(&run(&["quasi", "--f", "0", "--nu", "0", "--json"]));
    assert_eq!(v["epsilon"].as_f64(), Some(0.0));
    assert_eq!(v["r"].as_f64(), Some(0.0));
    let v = json(&run(&["quasi", "--f", "0", "--nu", "0.5", "--json"]));
    assert!((v["epsilon"].as_f64().unwrap() - 0.25).abs() < 1e-14);
    let o = run(&["quasi", "--f", "0.5", "--nu", "1"]);
    assert!(stdout(&o).contains("r         = -0.92417"));
}

#[test]
fn quasi_dimensional_and_methods() {
    let v = json(&run(&[
        "quasi", "--omega0", "2", "--omega", "2", "--F", "1", "--json",
    ]));
    assert_eq!(v["f"].as_f64(), Some(0.5));
    assert_eq!(v["nu"].as_f64(), Some(1.0));
    let eps = v["epsilon"].as_f64().unwrap();
    assert_eq!(v["energy"].as_f64(), Some(2.0 * eps));

    let v = json(&run(&[
        "quasi", "--f", "0.5", "--nu", "1", "--method", "oracle", "--json",
    ]));
    assert!((v["epsilon"].as_f64().unwrap() - eps).abs() < 1e-8);
    assert_eq!(v["eta_pp"], Value::Null);
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["quasi", "--f", "-1", "--nu", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["quasi", "--f", "30", "--nu", "20"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["quasi", "--method", "magnus"]).status.code(), Some(2));
    assert_eq!(
        run(&["quasi", "--precision", "quad"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["trace", "--samples", "1"]).status.code(), Some(2));
    // Outside the guard with too few terms: values printed, flagged.
    let o = run(&["quasi", "--f", "35", "--force", "--json"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["converged"], Value::Bool(false));
}

#[test]
fn trace_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let o = run(&[
        "trace",
        "--f",
        "0.5",
        "--nu",
        "1",
        "--samples",
        "65",
        "--out",
        path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&path);
    assert_eq!(header, ["tau", "u1", "v1", "u2", "v2", "norm_error"]);
    assert_eq!(rows.len(), 65);
    assert_eq!(rows[0], vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    assert!(rows[64][2].abs() < 1e-6);
    assert!(rows[32][3].abs() < 1e-6);
    assert!(rows.iter().all(|r| r[5] < 1e-8));
    let v = json(&o);
    assert!(v["u2_at_pi"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn trace_two_samples_and_free_precession() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let p = path.to_str().unwrap();
    assert_eq!(
        run(&[
            "trace",
            "--f",
            "0",
            "--nu",
            "1",
            "--samples",
            "2",
            "--out",
            p
        ])
        .status
        .code(),
        Some(0)
    );
    let (_, rows) = csv_rows(&path);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    assert_eq!(rows[1][0], 2.0 * std::f64::consts::PI);

    run(&[
        "trace",
        "--f",
        "0",
        "--nu",
        "1",
        "--samples",
        "33",
        "--out",
        p,
    ]);
    let (_, rows) = csv_rows(&path);
    for r in rows {
        assert!((r[1] - (r[0] / 2.0).cos()).abs() < 1e-12);
    }
}

#[test]
fn trace_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        run(&[
            "--threads",
            threads,
            "trace",
            "--f",
            "1.3",
            "--nu",
            "0.4",
            "--samples",
            "50",
            "--out",
            path.to_str().unwrap(),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn sweep_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = run(&[
        "sweep",
        "--depth",
        "16",
        "--with-oracle",
        "--out",
        path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["points_total"].as_u64(), Some(15 * 14 / 2));
    assert_eq!(v["terms"].as_u64(), Some(100));
    let mut r = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[..3], ["omega0", "omega", "F"]);
    let deviation = header.iter().position(|h| h == "deviation").unwrap();
    let eps = header.iter().position(|h| h == "eps_series").unwrap();
    let mut max: f64 = 0.0;
    let mut kept = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        let omega: f64 = rec[1].parse().unwrap();
        assert!(omega > 3.0 / 128.0);
        assert!(rec[eps].parse::<f64>().unwrap().abs() <= 0.5);
        max = max.max(rec[deviation].parse().unwrap());
        kept += 1;
    }
    assert_eq!(v["points_kept"].as_u64(), Some(kept));
    assert_eq!(v["max_deviation"].as_f64(), Some(max));
    assert!(max < 1.3e-4);
}

#[test]
fn branches_csv_and_gap() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    let o = run(&[
        "branches",
        "--F",
        "0.5",
        "--omega0",
        "1",
        "--omega-from",
        "0.3",
        "--omega-to",
        "0.42",
        "--samples",
        "13",
        "--out",
        path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&path);
    assert_eq!(header, ["omega", "n", "sign", "energy"]);
    assert_eq!(rows.len(), 13 * 5 * 2);
    let minima = json(&o)["gap_minima"].as_array().unwrap().clone();
    assert_eq!(minima.len(), 1);
    assert!((minima[0]["omega"].as_f64().unwrap() - 0.355776).abs() < 1e-3);

    let o = run(&[
        "branches",
        "--omega-from",
        "0.01",
        "--omega-to",
        "0.1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn limits_report() {
    let o = run(&["limits", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 3);
    assert!(suites[..2]
        .iter()
        .all(|s| s["max_error"].as_f64().unwrap() < 1e-8));
    assert_eq!(v["rows"].as_array().unwrap().len(), 20);

    let v = json(&run(&["limits", "--f-max", "0", "--json"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(run(&["limits", "--f-max", "40"]).status.code(), Some(2));
}

#[test]
fn oracle_command() {
    let o = run(&["oracle", "--f", "0.5", "--nu", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let diag_re = v["monodromy"][0][0][0].as_f64().unwrap();
    assert!((diag_re + 0.708202).abs() < 1e-5);
    assert!(v["unitarity_error"].as_f64().unwrap() < 1e-10);
    assert_eq!(run(&["oracle", "--steps", "10"]).status.code(), Some(2));
}
