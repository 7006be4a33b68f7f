use std::process::{Command, Output};

use bragg_entangle::sweep::CSV_HEADER;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bragg-entangle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn assert_one_line_error(o: &Output, needle: &str) {
    assert!(!o.status.success());
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: ") && err.contains(needle), "{err}");
}

#[test]
fn single_grid_point_gives_one_row() {
    let o = bin(&["sweep", "--set", "tau_start=2", "--set", "tau_stop=2", "--grid", "eta=3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], CSV_HEADER);
    assert!(lines[1].starts_with("2.00000000000e0,3.00000000000e0,3.00000000000e0,"));
    assert!(lines[1].ends_with(",ok"));
}

#[test]
fn rows_are_internally_consistent() {
    let o = bin(&["fig4", "--tau-max", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), header.len());
        if f[col("status")] != "ok" {
            continue;
        }
        let num = |name: &str| f[col(name)].parse::<f64>().unwrap();
        let (lhs, rhs) = (num("lhs"), num("rhs"));
        assert!((num("lhs_minus_rhs") - (lhs - rhs)).abs() <= 1e-10 * rhs.abs().max(1.0));
        assert_eq!(f[col("violated")] == "1", lhs < rhs - 1e-12);
        rows += 1;
    }
    // τ = 0 with quadrature probes heralds nothing
    assert_eq!(rows, 2 * 41 - 1);
    assert!(text.contains(",zero_coincidence\n"));
}

#[test]
fn output_file_and_stdout_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig5.csv");
    let o = bin(&["fig5", "--grid", "1,6,12", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let file = std::fs::read(&path).unwrap();
    assert_eq!(file, bin(&["fig5", "--grid", "1,6,12"]).stdout);
    assert_eq!(String::from_utf8(file).unwrap().lines().count(), 1 + 2 * 3);
}

#[test]
fn config_file_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"tau_stop": 0.1, "eta_a": 2.5, "eta_b": 2.5}"#).unwrap();
    let o = bin(&["fig2", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 2 * 3);
    assert!(text.lines().skip(1).all(|l| l.contains(",2.50000000000e0,2.50000000000e0,")));
}

#[test]
fn errors_are_single_line_diagnostics() {
    assert_one_line_error(&bin(&["fig2", "--set", "tau_step=0"]), "tau_step");
    assert_one_line_error(&bin(&["fig2", "--set", "colour=blue"]), "colour");
    assert_one_line_error(&bin(&["sweep", "--grid", "spin=1"]), "spin");
    assert_one_line_error(&bin(&["fig3", "--config", "/nonexistent/c.json"]), "");
    assert_one_line_error(&bin(&["fig3", "--out", "/nonexistent/dir/out.csv"]), "");

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\n\"eta_a\": ,\n}").unwrap();
    assert_one_line_error(&bin(&["fig2", "--config", cfg.to_str().unwrap()]), "line 2");
}

#[test]
fn overflow_points_are_flagged_not_fatal() {
    let o = bin(&["sweep", "--set", "eta_a=100", "--set", "tau_start=30", "--set", "tau_stop=30"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().ends_with(",overflow"));
}

#[test]
fn check_subcommand_passes() {
    let o = bin(&["check"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().count() >= 8);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for fig in ["fig2", "fig3", "fig4", "fig5"] {
        let a = bin(&[fig, "--tau-max", "3"]);
        let b = bin(&[fig, "--tau-max", "3"]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{fig}");
    }
}
