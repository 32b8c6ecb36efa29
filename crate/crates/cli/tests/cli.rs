use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twoqubit"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn field(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no '{key}' in {out}"))
        .trim()
        .parse()
        .unwrap()
}

/// Rows of a surface CSV as (header, rows of floats).
fn read_csv(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn negativity_of_bell_family_member() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "s.json",
        r#"{"family": {"family": 1, "a": 0.5, "v": 0.5, "alpha": 0}}"#,
    );
    let o = run(&["negativity", "--state", &f]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for key in ["oracle", "printed", "corrected"] {
        assert!((field(&out, key) - 0.5).abs() < 1e-12, "{key}: {out}");
    }
}

#[test]
fn negativity_of_maximally_mixed_raw_state() {
    let dir = TempDir::new().unwrap();
    let entries: Vec<&str> = (0..16)
        .map(|i| if i % 5 == 0 { "[0.25, 0]" } else { "[0, 0]" })
        .collect();
    let f = write(
        &dir,
        "s.json",
        &format!("{{\"raw\": [{}]}}", entries.join(",")),
    );
    let o = run(&["negativity", "--state", &f]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(field(&out, "oracle").abs() < 1e-12);
    assert!(!out.contains("printed"));
}

#[test]
fn negativity_family_three_reports_deviation() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "s.json",
        r#"{"family": {"family": 3, "c": 0.3, "d": 0.2, "v": 0.3}}"#,
    );
    let out = stdout(&run(&["negativity", "--state", &f]));
    assert!((field(&out, "oracle") - 0.2162278).abs() < 1e-7);
    assert!((field(&out, "printed") - 0.1605551).abs() < 1e-7);
    assert!((field(&out, "deviation") - 0.0556727).abs() < 1e-7);
    assert!((field(&out, "corrected") - field(&out, "oracle")).abs() < 1e-12);
}

#[test]
fn invalid_state_exits_2_with_line_number() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "s.json",
        "{\n  \"family\": {\n    \"family\": 3,\n    \"c\": 0.3, \"d\": 0.2,\n    \"v\": 0.45\n  }\n}",
    );
    let o = run(&["negativity", "--state", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":5:"), "{}", stderr(&o));

    let f = write(
        &dir,
        "bad.json",
        r#"{"family": {"family": 1, "a": 0.5, "v": 0.1, "x": 1}}"#,
    );
    assert_eq!(run(&["negativity", "--state", &f]).status.code(), Some(2));
}

#[test]
fn missing_state_file_exits_3() {
    let o = run(&["negativity", "--state", "/nonexistent/state.json"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(
        run(&["surface", "--figure", "9", "--out", "/tmp/x.csv"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "surface",
            "--figure",
            "1",
            "--theta-steps",
            "1",
            "--out",
            "/tmp/x.csv"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "surface",
            "--figure",
            "1",
            "--param",
            "zeta=1",
            "--out",
            "/tmp/x.csv"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn unwritable_output_exits_3() {
    let o = run(&[
        "surface",
        "--figure",
        "1",
        "--theta-steps",
        "3",
        "--time-steps",
        "3",
        "--out",
        "/nonexistent/dir/out.csv",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn surface_figure_three_triplet_point() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("f3.csv");
    let o = run(&[
        "surface",
        "--figure",
        "3",
        "--theta-steps",
        "3",
        "--time-steps",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(
        header,
        "theta,time,T,Sz,S2,s11,s12,N_oracle,N_printed,N_corrected"
    );
    assert_eq!(rows.len(), 15);
    // θ-major: rows 5..10 hold θ = π/4, the first of them at T = 0.
    let r = &rows[5];
    assert!((r[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    assert_eq!(r[2], 0.0);
    assert!((r[4] - 2.0).abs() < 1e-12);
    assert!((r[7] - 0.5).abs() < 1e-12);
}

#[test]
fn surface_figure_five_is_separable_at_zero_angle() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("f5.csv");
    let o = run(&[
        "surface",
        "--figure",
        "5",
        "--member",
        "3",
        "--theta-steps",
        "5",
        "--time-steps",
        "21",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = read_csv(&out);
    let column: Vec<_> = rows.iter().filter(|r| r[0] == 0.0).collect();
    assert_eq!(column.len(), 21);
    assert!(column.iter().all(|r| r[7].abs() < 1e-12));
}

#[test]
fn surface_rows_use_seventeen_significant_digits() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("f1.csv");
    run(&[
        "surface",
        "--figure",
        "1",
        "--theta-steps",
        "2",
        "--time-steps",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    let first = text.lines().nth(1).unwrap();
    let cells: Vec<&str> = first.split(',').collect();
    assert_eq!(cells.len(), 10);
    // θ = 0, T = 0: the state is |11⟩.
    assert_eq!(cells[3].parse::<f64>().unwrap(), -1.0);
    assert_eq!(cells[7].parse::<f64>().unwrap(), 0.0);
    for c in cells {
        let mantissa = c.split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{c}");
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let cfg = write(
        &dir,
        "run.json",
        &format!(
            r#"{{"figure": 2, "theta_steps": 4, "time_steps": 6, "params": {{"g2": 0.3}}, "out": "{}"}}"#,
            a.display()
        ),
    );
    let o = run(&["surface", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read_csv(&a).1.len(), 24);

    let o = run(&[
        "surface",
        "--config",
        &cfg,
        "--time-steps",
        "3",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read_csv(&b).1.len(), 12);

    let bad = write(&dir, "bad.json", "{\n  \"figure\": 1,\n  \"tol\": 0\n}");
    let o = run(&["verify", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":3:"), "{}", stderr(&o));
    let unknown = write(&dir, "unknown.json", r#"{"colour": "blue"}"#);
    assert_eq!(
        run(&["verify", "--config", &unknown]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_passes_and_fails_on_impossible_tolerance() {
    let o = run(&["verify", "--suite", "closed_forms"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("pass"));
    let o = run(&[
        "verify",
        "--suite",
        "invariance",
        "--trials",
        "5",
        "--tol",
        "1e-30",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn report_writes_csv_and_flags_documented_checks() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.csv");
    let o = run(&["report", "--out", out.to_str().unwrap(), "--samples", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).matches("FLAGGED").count(), 5);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("check,context,printed,corrected,oracle,abs_deviation_printed"));
}
