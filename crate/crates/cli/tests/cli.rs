use std::io::Write;
use std::process::{Command, Output};

use metproj_cli::{run, JobSpec};

fn job_file(json: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(json.as_bytes()).unwrap();
    f
}

fn metproj(json: &str, extra: &[&str]) -> Output {
    let f = job_file(json);
    Command::new(env!("CARGO_BIN_EXE_metproj"))
        .arg("--job")
        .arg(f.path())
        .args(extra)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in report:\n{report}"))
}

fn parse_vec(s: &str) -> Vec<f64> {
    s.trim_matches(|c| c == '[' || c == ']')
        .split(", ")
        .map(|p| p.parse().unwrap())
        .collect()
}

fn verdict(report: &str) -> (String, String, f64, f64) {
    let line = report
        .lines()
        .find(|l| l.starts_with("VERDICT "))
        .expect("verdict line");
    let parts: Vec<&str> = line.split(' ').collect();
    assert_eq!(parts.len(), 5, "{line}");
    (
        parts[1].to_string(),
        parts[2].to_string(),
        parts[3].parse().unwrap(),
        parts[4].parse().unwrap(),
    )
}

#[test]
fn projects_onto_the_unit_ball() {
    let out = metproj(
        r#"{"command": "project", "set": {"kind": "ball", "center": [0, 0], "radius": 1}, "x": [2, 0]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert_eq!(parse_vec(field(&report, "projection")), vec![1.0, 0.0]);
}

#[test]
fn refutes_at_a_sphere_point() {
    let out = metproj(
        r#"{"command": "refute", "set": {"kind": "ball", "center": [0, 0], "radius": 1}, "x": [0.6, 0.8]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert_eq!(field(&report, "conclusion"), "not Fréchet differentiable");
    let gap: f64 = field(&report, "gap").parse().unwrap();
    assert!((gap - 1.0).abs() < 1e-6);
    let (op, status, measured, threshold) = verdict(&report);
    assert_eq!((op.as_str(), status.as_str()), ("refute", "pass"));
    assert_eq!(measured, gap);
    assert!(threshold < 1e-3);
}

#[test]
fn refutation_fails_at_an_interior_point() {
    let out = metproj(
        r#"{"command": "refute", "set": {"kind": "ball", "center": [0, 0], "radius": 1}, "x": [0.3, 0.1], "w": [1, 0]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        field(&stdout(&out), "conclusion"),
        "no linearity violation detected"
    );
}

#[test]
fn witness_on_a_kplus_sequence() {
    let out = metproj(
        r#"{"command": "witness", "set": {"kind": "cone_l2"},
            "x": {"overrides": [], "tail": {"kind": "geometric", "a": 1.0, "rho": 0.5, "start": 1}},
            "n": [10]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert_eq!(field(&report, "region"), "kplus");
    let line = field(&report, "witness");
    let get = |key: &str| -> f64 {
        line.split(' ')
            .find_map(|p| p.strip_prefix(&format!("{key}=")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((get("residual_u") - 0.5).abs() < 1e-12);
    assert!((get("residual_v") - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(field(&report, "conclusion"), "not Fréchet differentiable");
}

#[test]
fn escape_witness_leaves_the_cone() {
    let out = metproj(
        r#"{"command": "witness", "set": {"kind": "cone_l2"}, "eps": 1e-3,
            "x": {"overrides": [[2, 3.0]], "tail": {"kind": "geometric", "a": 1.0, "rho": 0.9, "start": 1}}}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert_eq!(field(&report, "in_cone"), "false");
    let (_, status, measured, threshold) = verdict(&report);
    assert_eq!(status, "pass");
    assert!(measured < threshold);
}

#[test]
fn verify_passes_outside_and_fails_on_the_sphere() {
    let job = |x: &str| {
        format!(
            r#"{{"command": "verify", "set": {{"kind": "ball", "center": [0, 0, 0], "radius": 1}}, "x": {x}}}"#
        )
    };
    let out = metproj(&job("[2, 1, 0]"), &["--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(verdict(&stdout(&out)).1, "pass");

    let out = metproj(&job("[0, 0, 1]"), &["--seed", "7"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(field(&stdout(&out), "candidate"), "identity");
}

#[test]
fn orthant_commands_use_one_based_indices() {
    let out = metproj(
        r#"{"command": "classify", "set": {"kind": "cone_rn"}, "x": [3, -2, 0]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert_eq!(field(&report, "region"), "delta_rn");
    assert_eq!(field(&report, "plus"), "[1]");
    assert_eq!(field(&report, "minus"), "[2]");
    assert_eq!(field(&report, "zero"), "[3]");

    let out = metproj(
        r#"{"command": "refute", "set": {"kind": "cone_rn"}, "x": [3, -2, 0]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert_eq!(field(&report, "index"), "3");
    let (_, status, measured, threshold) = verdict(&report);
    assert_eq!(status, "pass");
    assert!((measured - 1.0).abs() < 1e-6);
    assert!(threshold < 1e-3);

    let out = metproj(
        r#"{"command": "derive", "set": {"kind": "cone_rn"}, "x": [3, -2, 1], "w": [1, 1, 1]}"#,
        &[],
    );
    let report = stdout(&out);
    assert_eq!(field(&report, "derivative"), "mask [1, 3]");
    assert_eq!(parse_vec(field(&report, "applied")), vec![1.0, 0.0, 1.0]);
}

#[test]
fn gateaux_at_a_sphere_point() {
    let out = metproj(
        r#"{"command": "gateaux", "set": {"kind": "ball", "center": [0, 0], "radius": 1}, "x": [1, 0], "w": [1, 1]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        parse_vec(field(&stdout(&out), "directional_derivative")),
        vec![0.0, 1.0]
    );
}

#[test]
fn usage_and_parse_errors_exit_with_two() {
    let bad_json = metproj("{\n  \"command\": \"project\",\n  \"set\": oops\n}", &[]);
    assert_eq!(bad_json.status.code(), Some(2));
    let err = String::from_utf8(bad_json.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");

    let unknown = metproj(
        r#"{"command": "project", "set": {"kind": "cone_rn"}, "x": [1], "y": 2}"#,
        &[],
    );
    assert_eq!(unknown.status.code(), Some(2));

    let witness_on_ball = metproj(
        r#"{"command": "witness", "set": {"kind": "ball", "center": [0], "radius": 1}, "x": [2]}"#,
        &[],
    );
    assert_eq!(witness_on_ball.status.code(), Some(2));

    let derive_l2 = metproj(
        r#"{"command": "derive", "set": {"kind": "cone_l2"}, "x": {"overrides": [], "tail": {"kind": "zero"}}}"#,
        &[],
    );
    assert_eq!(derive_l2.status.code(), Some(2));

    let bad_x = metproj(
        r#"{"command": "project", "set": {"kind": "cone_rn"}, "x": {"a": 1}}"#,
        &[],
    );
    assert_eq!(bad_x.status.code(), Some(2));
    assert!(String::from_utf8(bad_x.stderr).unwrap().contains("`x`"));

    let missing_flag = Command::new(env!("CARGO_BIN_EXE_metproj"))
        .output()
        .unwrap();
    assert_eq!(missing_flag.status.code(), Some(2));
}

#[test]
fn echoed_inputs_round_trip_bit_exactly() {
    let values = [
        0.1,
        -1.0 / 3.0,
        2.0f64.sqrt(),
        1e-300,
        6.02214076e23,
        f64::MIN_POSITIVE,
    ];
    let coords: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
    let json = format!(
        r#"{{"command": "project", "set": {{"kind": "cone_rn"}}, "x": [{}]}}"#,
        coords.join(", ")
    );
    let report = run(&JobSpec::parse(&json).unwrap(), None).unwrap();
    let echoed = parse_vec(field(&report.body, "x"));
    for (a, b) in echoed.iter().zip(&values) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn reports_are_deterministic() {
    let json = r#"{"command": "verify", "set": {"kind": "cone_rn"}, "x": [1.5, -0.5, 2.0], "options": {"samples": 50}}"#;
    let a = metproj(json, &["--seed", "3"]);
    let b = metproj(json, &["--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("seed: 3"));
}

#[test]
fn out_flag_writes_the_report_and_quiet_silences_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let json = r#"{"command": "project", "set": {"kind": "cone_rn"}, "x": [1, -1]}"#;
    let out = metproj(json, &["--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(parse_vec(field(&written, "projection")), vec![1.0, 0.0]);

    let quiet = metproj(json, &["--quiet"]);
    assert_eq!(quiet.status.code(), Some(0));
    assert!(quiet.stdout.is_empty());
}
