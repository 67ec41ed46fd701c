use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mfc_cli::RunReport;

fn mfc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_path(out: &Output) -> PathBuf {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "stdout must hold only the report path: {text:?}");
    PathBuf::from(lines[0])
}

fn ok(args: &[&str]) -> RunReport {
    let out = mfc(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    RunReport::read(&stdout_path(&out)).unwrap()
}

fn code(args: &[&str]) -> (i32, String) {
    let out = mfc(args);
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn demo(dir: &Path) -> PathBuf {
    let p = dir.join("three.csv");
    fs::write(&p, "label,f0,f1\n0,0.0,0.0\n0,1.0,0.0\n0,2.0,0.0\n").unwrap();
    p
}

#[test]
fn compress_examples() {
    let dir = tempfile::tempdir().unwrap();
    let data = demo(dir.path());
    let cover = dir.path().join("c.toml");
    let r = ok(&[
        "compress",
        "--input",
        s(&data),
        "--eta",
        "1",
        "--solver",
        "exact",
        "--out",
        s(&cover),
    ]);
    assert_eq!(r.results["selected"], serde_json::json!([1]));
    assert_eq!(r.config["compress"]["solver"]["solver"], "exact");
    let r = ok(&["compress", "--input", s(&data), "--eta", "0", "--out", s(&cover)]);
    assert_eq!(r.results["selected"], serde_json::json!([0, 1, 2]));
    let r = ok(&[
        "compress",
        "--input",
        s(&data),
        "--k",
        "3",
        "--budget-mode",
        "total",
        "--out",
        s(&cover),
    ]);
    assert_eq!(r.results["eta"], 0.0);
    let r = ok(&["compress", "--input", s(&data), "--k", "1", "--out", s(&cover)]);
    assert_eq!(r.results["eta"], 1.0);
    let sol = mfc_core::io::read_cover(&cover).unwrap();
    assert_eq!(sol.selected, vec![1]);
    assert_eq!(sol.weights, vec![3]);
}

#[test]
fn compress_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "label,f0\n0,1.0\n1,oops\n").unwrap();
    let cover = dir.path().join("c.toml");
    let (c, err) = code(&["compress", "--input", s(&bad), "--eta", "1", "--out", s(&cover)]);
    assert_eq!(c, 2);
    assert!(err.contains("line 3"), "{err}");

    let two = dir.path().join("two.csv");
    fs::write(&two, "label,f0\n0,0\n1,5\n1,6\n").unwrap();
    let (c, _) = code(&[
        "compress",
        "--input",
        s(&two),
        "--k",
        "1",
        "--budget-mode",
        "total",
        "--out",
        s(&cover),
    ]);
    assert_eq!(c, 3);
    let (c, _) = code(&["compress", "--input", s(&two), "--k", "2", "--out", s(&cover)]);
    assert_eq!(c, 3);
    let (c, _) = code(&["compress", "--input", s(&two), "--out", s(&cover)]);
    assert_eq!(c, 2);
}

#[test]
fn node_limit_saves_incumbent() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("u.csv");
    ok(&[
        "gen-data",
        "uniform2d",
        "--count",
        "200",
        "--seed",
        "3",
        "--out",
        s(&data),
    ]);
    let cover = dir.path().join("c.toml");
    let out = mfc(&[
        "compress",
        "--input",
        s(&data),
        "--eta",
        "0.1",
        "--solver",
        "exact",
        "--node-limit",
        "1",
        "--out",
        s(&cover),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let report = RunReport::read(&stdout_path(&out)).unwrap();
    assert_eq!(report.results["status"], "node_limit");
    let ds = mfc_core::io::read_dataset(&data).unwrap();
    let sol = mfc_core::io::read_cover(&cover).unwrap();
    assert!(mfc_core::verify_cover(&ds, &sol, sol.norm).valid);
    assert_eq!(sol.eta, 0.1);
}

#[test]
fn verify_bound_reports() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("b.csv");
    ok(&[
        "gen-data",
        "blobs",
        "--samples-per-class",
        "25",
        "--centers",
        "0,0;8,0",
        "--margin",
        "1",
        "--out",
        s(&data),
    ]);
    let cover = dir.path().join("c.toml");
    ok(&["compress", "--input", s(&data), "--eta", "0", "--out", s(&cover)]);
    let r = ok(&[
        "verify-bound",
        "--dataset",
        s(&data),
        "--cover",
        s(&cover),
        "--eps",
        "0.4",
        "--models",
        "10",
    ]);
    assert_eq!(r.results["holds_for_all"], true);
    for m in r.results["models"].as_array().unwrap() {
        assert!(m["gap"].as_f64().unwrap().abs() <= 1e-12);
    }

    ok(&[
        "compress",
        "--input",
        s(&data),
        "--eta",
        "1.5",
        "--out",
        s(&cover),
    ]);
    let r = ok(&[
        "verify-bound",
        "--dataset",
        s(&data),
        "--cover",
        s(&cover),
        "--eps",
        "0.4",
        "--models",
        "100",
    ]);
    assert_eq!(r.results["holds_for_all"], true);
    assert_eq!(r.results["models"].as_array().unwrap().len(), 100);

    // Undercounted weights are reported, not rejected.
    let mut sol = mfc_core::io::read_cover(&cover).unwrap();
    sol.weights.iter_mut().for_each(|q| *q = 1);
    mfc_core::io::write_cover(&cover, &sol).unwrap();
    let r = ok(&[
        "verify-bound",
        "--dataset",
        s(&data),
        "--cover",
        s(&cover),
        "--eps",
        "0.4",
        "--models",
        "20",
    ]);
    assert_eq!(r.results["holds_for_all"], false);

    sol.eta = 0.01;
    mfc_core::io::write_cover(&cover, &sol).unwrap();
    let (c, _) = code(&[
        "verify-bound",
        "--dataset",
        s(&data),
        "--cover",
        s(&cover),
        "--eps",
        "0.4",
    ]);
    assert_eq!(c, 3);
}

#[test]
fn gen_data_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        ok(&[
            "gen-data",
            "tradeoff",
            "--p",
            "0.8",
            "--n",
            "10",
            "--samples",
            "1000",
            "--seed",
            "9",
            "--out",
            s(p),
        ]);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1001);
    assert!(lines.iter().all(|l| l.split(',').count() == 12));
    let (c, err) = code(&[
        "gen-data",
        "blobs",
        "--centers",
        "0,0;1,0",
        "--spread",
        "1",
        "--out",
        s(&a),
    ]);
    assert_eq!(c, 2);
    assert!(err.contains("apart"), "{err}");
    let bin = dir.path().join("u.bin");
    ok(&["gen-data", "uniform2d", "--count", "50", "--out", s(&bin)]);
    assert_eq!(mfc_core::io::read_dataset(&bin).unwrap().len(), 50);
}

#[test]
fn plot_output() {
    let dir = tempfile::tempdir().unwrap();
    let data = demo(dir.path());
    let cover = dir.path().join("c.toml");
    let svg = dir.path().join("p.svg");
    ok(&[
        "compress",
        "--input",
        s(&data),
        "--eta",
        "1",
        "--solver",
        "exact",
        "--out",
        s(&cover),
    ]);
    ok(&[
        "plot",
        "--dataset",
        s(&data),
        "--cover",
        s(&cover),
        "--out",
        s(&svg),
        "--width",
        "200",
    ]);
    let text = fs::read_to_string(&svg).unwrap();
    let balls: Vec<&str> = text.lines().filter(|l| l.contains("class=\"ball\"")).collect();
    assert_eq!(balls.len(), 1);
    // Extent [-1, 3] maps onto 200 px, so the middle point sits at 20 + 100.
    assert!(
        balls[0].contains("cx=\"120.000\"") && balls[0].contains("r=\"50.000\""),
        "{}",
        balls[0]
    );
    let again = dir.path().join("q.svg");
    ok(&[
        "plot",
        "--dataset",
        s(&data),
        "--cover",
        s(&cover),
        "--out",
        s(&again),
        "--width",
        "200",
    ]);
    assert_eq!(text, fs::read_to_string(&again).unwrap());

    ok(&["compress", "--input", s(&data), "--eta", "0", "--out", s(&cover)]);
    ok(&[
        "plot",
        "--dataset",
        s(&data),
        "--cover",
        s(&cover),
        "--out",
        s(&svg),
    ]);
    let text = fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("class=\"ball\"").count(), 3);
    assert_eq!(text.matches("r=\"0.000\"").count(), 3);

    let wide = dir.path().join("w.csv");
    fs::write(&wide, "label,f0,f1,f2\n0,0,0,0\n").unwrap();
    let (c, _) = code(&[
        "plot",
        "--dataset",
        s(&wide),
        "--cover",
        s(&cover),
        "--out",
        s(&svg),
    ]);
    assert_eq!(c, 2);
}

#[test]
fn compare_table() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("b.csv");
    ok(&[
        "gen-data",
        "blobs",
        "--samples-per-class",
        "12",
        "--centers",
        "0,0;8,0",
        "--margin",
        "2",
        "--out",
        s(&data),
    ]);
    let table = dir.path().join("t.csv");
    let r = ok(&[
        "compare",
        "--train",
        s(&data),
        "--methods",
        "mcs",
        "--budget",
        "24",
        "--budget-mode",
        "total",
        "--eps",
        "0.5",
        "--epochs",
        "30",
        "--out",
        s(&table),
    ]);
    let rows = r.results["rows"].as_array().unwrap();
    assert_eq!(rows[0]["standard_score"], rows[1]["standard_score"]);
    assert_eq!(rows[0]["robust_score"], rows[1]["robust_score"]);

    let r = ok(&[
        "compare",
        "--train",
        s(&data),
        "--budget",
        "3",
        "--repeats",
        "3",
        "--eps",
        "0.5",
        "--epochs",
        "60",
        "--out",
        s(&table),
        "--jobs",
        "2",
    ]);
    let rows = r.results["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert_eq!(row["robust_score"]["values"].as_array().unwrap().len(), 3);
        assert!(row["robust_score"]["mean"].as_f64().unwrap() >= 0.95, "{row}");
    }
    let text = fs::read_to_string(&table).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().nth(1).unwrap().starts_with("full,,"));
}

#[test]
fn replay_detects_changes() {
    let dir = tempfile::tempdir().unwrap();
    let data = demo(dir.path());
    let cover = dir.path().join("c.toml");
    let out = mfc(&["compress", "--input", s(&data), "--eta", "1", "--out", s(&cover)]);
    let report = stdout_path(&out);
    let r = ok(&["replay", "--report", s(&report)]);
    assert_eq!(r.command, "compress");
    fs::write(&data, "label,f0,f1\n0,0.0,0.0\n0,5.0,0.0\n0,2.0,0.0\n").unwrap();
    let (c, _) = code(&["replay", "--report", s(&report)]);
    assert_eq!(c, 5);
}
