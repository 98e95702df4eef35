//! End-to-end tests of the `linkbound` binary: flag grammar, exit codes,
//! stream separation, determinism of emitted data.

use std::process::{Command, Output};

fn linkbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn bound_reference_point_in_megabytes() {
    let out = linkbound(&[
        "bound", "--power", "1e-3", "--speed", "5", "--alpha", "2", "--unit", "MB",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "value_MB,formula,series_terms,trunc_err"
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    let value: f64 = fields[0].parse().unwrap();
    assert!((value - 3.534_407_717_671_471).abs() < 1e-9);
    assert_eq!(fields[1], "thm1");
}

#[test]
fn bound_rejects_sub_unity_snr_with_hypothesis_message() {
    let out = linkbound(&["bound", "--power", "1e-9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty(), "data stream must stay clean");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("S > 1"), "stderr: {err}");
}

#[test]
fn bound_oracle_flag_covers_low_snr() {
    let out = linkbound(&["bound", "--power", "1e-9", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let value: f64 = fields[0].parse().unwrap();
    assert!(value > 0.0);
    assert_eq!(fields[1], "quadrature");
}

#[test]
fn bound_selects_offset_form_at_alpha_two() {
    let out = linkbound(&["bound", "--z0", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let fields_line = stdout_str(&out);
    let fields: Vec<&str> = fields_line.lines().nth(1).unwrap().split(',').collect();
    let value: f64 = fields[0].parse().unwrap();
    assert!((value - 6.218_825_524_111_966e8).abs() / 6.2e8 < 1e-9);
    assert_eq!(fields[1], "thm2");
}

#[test]
fn finite_one_hour_ratio() {
    let out = linkbound(&["finite", "--T", "3600", "--speed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let ratio: f64 = fields[2].parse().unwrap();
    assert!(ratio > 0.80);
    assert!((ratio - 0.831_189_781_571_026_4).abs() < 1e-9);
}

#[test]
fn sweep_fig2_grid_twice_is_byte_identical() {
    let args = [
        "sweep",
        "--axis",
        "v=1:100:50:log",
        "--axis",
        "P=1e-3:100:50:log",
        "--unit",
        "MB",
    ];
    let first = linkbound(&args);
    let second = linkbound(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout_str(&first);
    assert_eq!(text.lines().count(), 2501);
    assert_eq!(
        text.lines().next().unwrap(),
        "v,P,value_MB,formula,trunc_err"
    );
    assert!(!text.contains('\r'), "LF line endings only");
}

#[test]
fn sweep_csv_json_round_trip_bit_exact() {
    let base = ["sweep", "--axis", "S=0.5:1e6:25:log", "--formula", "thm1"];
    let csv_out = linkbound(&base);
    let json_out = linkbound(&[&base[..], &["--format", "json"]].concat());
    assert_eq!(csv_out.status.code(), Some(0));
    assert_eq!(json_out.status.code(), Some(0));

    let csv = stdout_str(&csv_out);
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let objects: Vec<serde_json::Value> = serde_json::from_slice(&json_out.stdout).unwrap();
    assert_eq!(objects.len(), 25);
    for (line, obj) in lines.zip(&objects) {
        for (name, field) in header.iter().zip(line.split(',')) {
            match &obj[*name] {
                serde_json::Value::Number(n) => {
                    let a: f64 = field.parse().unwrap();
                    assert_eq!(a.to_bits(), n.as_f64().unwrap().to_bits(), "column {name}");
                }
                serde_json::Value::String(s) => assert_eq!(s, field),
                other => panic!("unexpected JSON value {other:?}"),
            }
        }
    }
    // sub-unity S rows fell back to the oracle and are tagged as such
    assert!(csv.contains("quadrature"));
    assert!(csv.contains("thm1"));
}

#[test]
fn plan_solves_speed_from_power() {
    let out = linkbound(&[
        "plan",
        "--target",
        "3.53440771767147113MB",
        "--power",
        "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[0], "speed");
    let speed: f64 = fields[2].parse().unwrap();
    assert!((speed - 5.0).abs() < 1e-9, "speed {speed}");
}

#[test]
fn plan_infeasible_target_exits_four() {
    let out = linkbound(&["plan", "--target", "100nats", "--speed", "5"]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("infeasible"));
}

#[test]
fn config_file_overrides_defaults_and_flags_override_config() {
    let dir = std::env::temp_dir().join("linkbound_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cfg.json");
    std::fs::write(&path, r#"{"power": 1e-3, "unit": "MB"}"#).unwrap();
    let config = path.to_str().unwrap();

    let from_file = linkbound(&["bound", "--config", config]);
    assert_eq!(from_file.status.code(), Some(0));
    let v_file: f64 = stdout_str(&from_file)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((v_file - 3.534_407_717_671_471).abs() < 1e-9);

    let flag_wins = linkbound(&["bound", "--config", config, "--power", "1"]);
    let v_flag: f64 = stdout_str(&flag_wins)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(v_flag > 100.0, "S=1e8 bound in MB, got {v_flag}");
    std::fs::remove_file(path).ok();
}

#[test]
fn plan_accepts_fixed_parameter_from_config_file() {
    let dir = std::env::temp_dir().join("linkbound_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("plan_cfg.json");
    std::fs::write(&path, r#"{"speed": 5.0}"#).unwrap();

    let out = linkbound(&[
        "plan",
        "--target",
        "1.95989179556263312e7nats",
        "--config",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout_str(&out);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[0], "power");
    let power: f64 = fields[1].parse().unwrap();
    assert!((power - 1e-3).abs() / 1e-3 < 1e-8);
    std::fs::remove_file(path).ok();
}

#[test]
fn validate_passes_and_reports_every_check() {
    let out = linkbound(&["validate"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout_str(&out);
    assert!(text.lines().count() >= 11);
    for name in [
        "oracle_equivalence",
        "consistency_triangle",
        "loose_envelope_reference",
        "one_hour_endurance",
        "corollary1_chain",
        "series_truncation",
        "planner_round_trips",
        "scaling_laws",
        "literature_value_regression",
        "determinism",
    ] {
        let line = text
            .lines()
            .find(|l| l.starts_with(name))
            .unwrap_or_else(|| panic!("missing check {name}"));
        assert!(line.contains(",pass,"), "check failed: {line}");
    }
}

#[test]
fn help_lists_every_documented_flag() {
    for (sub, extra) in [
        ("bound", vec!["--oracle"]),
        ("finite", vec!["--T"]),
        ("sweep", vec!["--axis", "--formula"]),
        ("plan", vec!["--target"]),
    ] {
        let out = linkbound(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout_str(&out);
        for flag in [
            "--bandwidth",
            "--noise",
            "--ref-distance",
            "--gain",
            "--power",
            "--alpha",
            "--x0",
            "--z0",
            "--speed",
            "--unit",
            "--format",
            "--series-max-terms",
            "--qtol",
            "--config",
        ] {
            assert!(text.contains(flag), "{sub} --help missing {flag}");
        }
        for flag in extra {
            assert!(text.contains(flag), "{sub} --help missing {flag}");
        }
    }
}

#[test]
fn unknown_flag_exits_two() {
    let out = linkbound(&["bound", "--warp", "9"]);
    assert_eq!(out.status.code(), Some(2));
}
