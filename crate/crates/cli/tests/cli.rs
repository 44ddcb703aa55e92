use std::process::{Command, Output};

fn tubekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubekit"))
        .args(args)
        .env_remove("TUBEKIT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn hilbert_dist_on_disk() {
    let o = tubekit(&["hilbert-dist", "--body", "builtin:disk", "--x", "0,0", "--y", "0.5,0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("# tubekit "));
    assert_eq!(lines.next().unwrap(), "distance,error_bound");
    assert_eq!(lines.next().unwrap(), "0.549306144,0");
}

#[test]
fn unknown_builtin_lists_valid_names() {
    let o = tubekit(&["hilbert-dist", "--body", "builtin:blob", "--x", "0,0", "--y", "0.5,0"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("field `body`"), "{e}");
    assert!(e.contains("square") && e.contains("pz-hyperbola"), "{e}");
}

#[test]
fn run_config_rejects_unknown_and_missing_fields() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"command": "hilbert-dist", "body": "builtin:disk", "x": [0, 0], "yy": [1, 0]}"#).unwrap();
    let o = tubekit(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("yy") && stderr(&o).contains("line 1"), "{}", stderr(&o));

    let noseed = dir.path().join("noseed.json");
    std::fs::write(&noseed, r#"{"command": "delta-profile", "body": "builtin:disk"}"#).unwrap();
    let o = tubekit(&["run", "--config", noseed.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("field `seed`"), "{}", stderr(&o));

    let stray = dir.path().join("stray.json");
    std::fs::write(&stray, r#"{"command": "asym-embed", "body": "builtin:disk"}"#).unwrap();
    let o = tubekit(&["run", "--config", stray.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("field `body` is not used"), "{}", stderr(&o));
}

#[test]
fn run_config_accepts_inline_body_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"command": "hilbert-dist",
            "body": {"type": "h-polytope", "normals": [[1,0],[-1,0],[0,1],[0,-1]], "offsets": [1,1,1,1]},
            "x": [0, 0], "y": [0.3333333333333333, 0], "format": "json"}"#,
    )
    .unwrap();
    let o = tubekit(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let d = v["rows"][0][0].as_f64().unwrap();
    assert!((d - 0.5 * 2f64.ln()).abs() < 1e-12);
}

#[test]
fn sampled_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = tubekit(&[
            "delta-profile", "--body", "builtin:square", "--scales", "1,2,3", "--points", "16",
            "--quadruples", "2000", "--seed", "7", "--out", p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("# tubekit 0.1.0 schema=1 command=delta-profile seed=7 config="));
    assert_eq!(text.lines().nth(1).unwrap(), "scale,n_points,n_quadruples,alpha_lo,alpha_hi");
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tubekit"))
        .args(["asym-embed", "--n", "4,16"])
        .env("TUBEKIT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("asym-embed.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "n,sup_error");
    assert!(text.lines().nth(2).unwrap().starts_with("4,0.41295012"));
}

#[test]
fn koba_interval_on_tube_over_disk() {
    let o = tubekit(&["koba-interval", "--body", "builtin:disk", "--z", "0,0,0,0", "--w", "0,2,0,0", "--seed", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let row = stdout(&o).lines().nth(2).unwrap().to_string();
    assert!(row.starts_with("1.57079633,1.57079633,0,"), "{row}");
}

#[test]
fn outside_point_is_a_config_error() {
    let o = tubekit(&["koba-interval", "--body", "builtin:disk", "--z", "2,0,0,0", "--w", "0,2,0,0", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dashboard_rejects_unbounded_base() {
    let o = tubekit(&["dashboard", "--base", "builtin:strip", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bounded"));
}

#[test]
fn dashboard_ellipse_indicators() {
    let o = tubekit(&[
        "dashboard", "--base", "builtin:ellipse", "--seed", "7", "--format", "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let d = &v["detail"];
    assert_eq!(d["hilbert_alpha_bounded"], true);
    assert_eq!(d["tube_flat_witness"], true);
    assert_eq!(d["no_segment_in_limits"], true);
}
