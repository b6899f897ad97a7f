use std::path::Path;
use std::process::{Command, Output};

fn semilab(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_semilab"));
    cmd.args(args).env_remove("SEMILAB_OUT");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn list_prints_seven_scenarios() {
    let out = semilab(&["list"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    for name in [
        "ex1-shift-double",
        "ex2-multiplication",
        "ex3-translation-limit",
        "ex4-nonstabilizable",
        "ex5-log-growth",
        "remark2-jordan",
        "duhamel-vs-closed-form",
    ] {
        assert!(text.contains(name));
    }
    assert!(text.contains("Example 2") && text.contains("Remark 2"));
}

#[test]
fn unknown_scenario_exits_with_two_and_lists_names() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilab(&["run", "ex7", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("remark2-jordan") && err.contains("ex1-shift-double"));
}

#[test]
fn ex2_series_matches_the_formula_and_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let out = semilab(
            &[
                "run",
                "ex2-multiplication",
                "--k-max",
                "1000",
                "--out",
                dir.to_str().unwrap(),
            ],
            &[],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let series = read(&a.path().join("series.csv"));
    let mut lines = series.lines();
    assert_eq!(lines.next(), Some("k,term,partial_sum"));
    let k4: Vec<&str> = lines.nth(3).unwrap().split(',').collect();
    assert_eq!(k4[0], "4");
    assert!((k4[1].parse::<f64>().unwrap() - 0.08192).abs() < 1e-4);
    for f in ["decay.csv", "angles.csv", "series.csv", "growth.csv"] {
        assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)), "{f}");
    }
    assert!(read(&a.path().join("angles.csv")).starts_with("T,s,angle,sup_profile\n"));
    assert!(read(&a.path().join("decay.csv")).starts_with("t,norm\n"));
    assert!(read(&a.path().join("growth.csv")).starts_with("t,ratio\n"));
}

#[test]
fn remark2_reports_m_values_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilab(
        &["run", "remark2-jordan", "--plot"],
        &[("SEMILAB_OUT", dir.path())],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let inv: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("invariance.json"))).unwrap();
    assert_eq!(inv["residuals"]["m(1,0)"].as_f64(), Some(1.0));
    assert_eq!(inv["passed"], serde_json::Value::Bool(true));
    for f in ["decay.svg", "angles.svg", "series.svg", "growth.svg"] {
        assert!(read(&dir.path().join(f)).starts_with("<svg"), "{f}");
    }
}

#[test]
fn plotting_leaves_tables_untouched() {
    let plain = tempfile::tempdir().unwrap();
    let plotted = tempfile::tempdir().unwrap();
    for (dir, plot) in [(plain.path(), false), (plotted.path(), true)] {
        let mut args = vec!["run", "ex1-shift-double", "--out", dir.to_str().unwrap()];
        if plot {
            args.push("--plot");
        }
        assert!(semilab(&args, &[]).status.success());
    }
    for f in [
        "decay.csv",
        "angles.csv",
        "series.csv",
        "growth.csv",
        "invariance.json",
    ] {
        assert_eq!(
            read(&plain.path().join(f)),
            read(&plotted.path().join(f)),
            "{f}"
        );
    }
}

#[test]
fn csv_values_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilab(
        &[
            "run",
            "ex5-log-growth",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert!(out.status.success());
    let text = read(&dir.path().join("growth.csv"));
    for line in text.lines().skip(1) {
        for cell in line.split(',') {
            let x: f64 = cell.parse().unwrap();
            assert_eq!(format!("{x:.16e}"), cell);
        }
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out_dir = dir.path().join("from-config");
    std::fs::write(
        &cfg,
        format!(
            "# small run\nt_max = 10\nt_step = 5\nk_max = 3\nformat = json\nout = {}\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let out = semilab(
        &[
            "run",
            "ex2-multiplication",
            "--config",
            cfg.to_str().unwrap(),
            "--k-max",
            "5",
        ],
        &[],
    );
    // the short horizon trips the decay checks; tables are written first
    assert_eq!(out.status.code(), Some(3));
    let series: serde_json::Value =
        serde_json::from_str(&read(&out_dir.join("series.json"))).unwrap();
    assert_eq!(series["rows"].as_array().unwrap().len(), 5);
    assert_eq!(series["columns"][0], "k");
    let decay: serde_json::Value =
        serde_json::from_str(&read(&out_dir.join("decay.json"))).unwrap();
    assert_eq!(decay["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn threshold_failures_exit_with_three() {
    // a one-step horizon is too short for the sup profile to settle
    let dir = tempfile::tempdir().unwrap();
    let out = semilab(
        &[
            "run",
            "ex3-translation-limit",
            "--t-max",
            "5",
            "--t-step",
            "5",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("threshold"), "{err}");
    assert!(dir.path().join("angles.csv").exists());
}

#[test]
fn bad_parameters_and_missing_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let out = semilab(
        &["run", "ex2-multiplication", "--t-step", "-1", "--out", o],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("nope.cfg");
    let out = semilab(
        &[
            "run",
            "ex2-multiplication",
            "--config",
            missing.to_str().unwrap(),
            "--out",
            o,
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unwritable_output_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("sub");
    let out = semilab(
        &["run", "ex1-shift-double", "--out", target.to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(4));
}
