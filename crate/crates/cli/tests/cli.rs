use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gof")).args(args).env_remove("GOF_DEFAULT_TOL").output().unwrap()
}

fn gof_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gof")).args(args).env(key, val).output().unwrap()
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn strip(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn lists_presets() {
    let out = gof(&["list-presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert!(names.len() >= 8);
    for n in ["exb1", "sumexa", "thm2-tight", "prop1a-image", "ex2-negative", "omega-check"] {
        assert!(names.contains(&n), "{n} missing");
    }
}

#[test]
fn exb1_report_has_tight_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let st = gof(&["run", "--preset", "exb1", "--out", out.to_str().unwrap()]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let r = read(&out);
    let b0 = &r["results"]["tasks"][0]["bounds"];
    let b1 = &r["results"]["tasks"][1]["bounds"];
    assert!((b0["alpha_opt"].as_f64().unwrap() - 8.0).abs() < 1e-9 && b0["tight"] == true);
    assert!((b1["beta_opt"].as_f64().unwrap() - 2.0).abs() < 1e-9 && b1["tight"] == true);
    assert_eq!(r["all_checks_pass"], true);
    assert_eq!(r["toolkit_version"], env!("CARGO_PKG_VERSION"));
    assert!(r["timing"]["total_seconds"].is_number());
}

#[test]
fn pertexa_report_from_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("s.json");
    fs::write(&sc, r#"{"source":"pertexa","lambda":0.0,"mu":0.2,"eta":0.2,"use_paper_bounds":true}"#).unwrap();
    let out = dir.path().join("r.json");
    let st = gof(&["run", "--scenario", sc.to_str().unwrap(), "--out", out.to_str().unwrap(), "--strict"]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let r = read(&out);
    let t = &r["results"]["tasks"];
    assert!((t[0]["bounds"]["alpha_opt"].as_f64().unwrap() - 2.5).abs() < 1e-9);
    let p = &t[2]["pert"];
    assert_eq!(p["source"]["source"], "pinned");
    assert!((p["prediction"]["lower"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((p["prediction"]["upper"].as_f64().unwrap() - 22.0).abs() < 1e-12);
    assert_eq!(p["prediction"]["lower_valid"], true);
    assert_eq!(p["prediction"]["upper_valid"], true);
    let provs: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["provenance"].as_str().unwrap()).collect();
    assert!(provs.contains(&"paper") && provs.contains(&"computed"));
}

#[test]
fn computed_source_bounds_when_not_pinned() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("s.json");
    fs::write(&sc, r#"{"source":"pertexa","use_paper_bounds":false}"#).unwrap();
    let out = dir.path().join("r.json");
    assert!(gof(&["run", "--scenario", sc.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());
    let r = read(&out);
    assert_eq!(r["results"]["tasks"][2]["pert"]["source"]["source"], "computed");
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("bad.json");
    fs::write(&sc, "{\"group\": [").unwrap();
    let st = gof(&["run", "--scenario", sc.to_str().unwrap()]);
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("malformed JSON"));
}

#[test]
fn schema_errors_list_every_path() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("bad.json");
    fs::write(
        &sc,
        r#"{"group":{"factors":[4]},"n":1,"extra":1,
            "atoms":{"a":{"window":"indicator","set":["x"]}},
            "window_sets":{"w":[[["a"]]]},
            "tasks":[{"task":"frobnicate"},{"task":"ordinary_bounds","windows":"zz"}]}"#,
    )
    .unwrap();
    let st = gof(&["run", "--scenario", sc.to_str().unwrap()]);
    assert_eq!(st.status.code(), Some(2));
    let err = String::from_utf8_lossy(&st.stderr);
    for p in ["/extra", "/atoms/a/set/0", "/tasks/0/task", "/tasks/1/windows"] {
        assert!(err.contains(p), "{p} missing from\n{err}");
    }
}

#[test]
fn unknown_preset_is_schema_error() {
    assert_eq!(gof(&["run", "--preset", "nope"]).status.code(), Some(2));
}

#[test]
fn strict_mode_exits_3_on_findings() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("s.json");
    // expectation that cannot hold produces a finding
    fs::write(
        &sc,
        r#"{"group":{"factors":[4]},"n":1,
            "atoms":{"a":{"window":"indicator","set":[0]}},
            "window_sets":{"w":[[["a"]]]},
            "tasks":[{"task":"ordinary_bounds","windows":"w"}],
            "expect":[{"label":"wrong","path":"/tasks/0/bounds/beta_opt","value":3.0,"tol":1e-9,"provenance":"computed"}]}"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let args = ["run", "--scenario", sc.to_str().unwrap(), "--out", out.to_str().unwrap()];
    assert_eq!(gof(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(gof(&strict).status.code(), Some(3));
    assert_eq!(read(&out)["all_checks_pass"], false);
}

#[test]
fn spectra_csv_is_sorted_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let csv = dir.path().join("spec.csv");
    let st = gof(&["run", "--preset", "pertexa", "--out", out.to_str().unwrap(), "--spectra", csv.to_str().unwrap()]);
    assert!(st.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,eigenvalue"));
    let vals: Vec<f64> = lines
        .enumerate()
        .map(|(i, l)| {
            let (idx, v) = l.split_once(',').unwrap();
            assert_eq!(idx.parse::<usize>().unwrap(), i);
            v.parse().unwrap()
        })
        .collect();
    assert_eq!(vals.len(), 64);
    assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    let r = read(&out);
    assert_eq!(r["results"]["tasks"][0]["spectrum_file"], csv.to_str().unwrap());
    assert!(dir.path().join("spec.task3.csv").exists());
}

#[test]
fn reports_reproducible_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["sumexa", "thm2-tight", "ex2-negative"] {
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        assert!(gof(&["run", "--preset", preset, "--out", a.to_str().unwrap()]).status.success());
        assert!(gof(&["run", "--preset", preset, "--out", b.to_str().unwrap()]).status.success());
        assert_eq!(strip(read(&a)), strip(read(&b)), "{preset}");
    }
}

#[test]
fn tolerance_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("s.json");
    fs::write(
        &sc,
        r#"{"source":"exb1","tolerances":{"psd":1e-7,"kernel":1e-7,"bisection":1e-12}}"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let o = out.to_str().unwrap();
    let s = sc.to_str().unwrap();
    let psd = |v: &Value| v["tolerances"]["psd"].as_f64().unwrap();

    assert!(gof(&["run", "--preset", "exb1", "--out", o]).status.success());
    assert_eq!(psd(&read(&out)), 1e-9);
    assert!(gof_env(&["run", "--preset", "exb1", "--out", o], "GOF_DEFAULT_TOL", "1e-6").status.success());
    assert_eq!(psd(&read(&out)), 1e-6);
    assert!(gof_env(&["run", "--scenario", s, "--out", o], "GOF_DEFAULT_TOL", "1e-6").status.success());
    assert_eq!(psd(&read(&out)), 1e-7);
    assert!(gof_env(&["run", "--scenario", s, "--out", o, "--tol", "1e-5"], "GOF_DEFAULT_TOL", "1e-6").status.success());
    assert_eq!(psd(&read(&out)), 1e-5);
    assert_eq!(gof(&["run", "--preset", "exb1", "--tol=-1"]).status.code(), Some(1));
}

#[test]
fn several_inputs_with_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let st = gof(&["run", "--preset", "exb1", "--preset", "remark-theta0", "--preset", "thm2-tight", "--jobs", "3", "--out", out.to_str().unwrap()]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    for n in ["exb1", "remark-theta0", "thm2-tight"] {
        let r = read(&dir.path().join(format!("r.{n}.json")));
        assert_eq!(r["all_checks_pass"], true, "{n}");
    }
    assert_eq!(gof(&["run", "--preset", "exb1", "--preset", "sumexa"]).status.code(), Some(1));
}

#[test]
fn report_goes_to_stdout_without_out() {
    let st = gof(&["run", "--preset", "exb1"]);
    assert!(st.status.success());
    let r: Value = serde_json::from_slice(&st.stdout).unwrap();
    assert_eq!(r["scenario"]["name"], "exb1");
}

#[test]
fn exb1_resolution_override() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("s.json");
    fs::write(&sc, r#"{"source":"exb1","M":3}"#).unwrap();
    let out = dir.path().join("r.json");
    assert!(gof(&["run", "--scenario", sc.to_str().unwrap(), "--out", out.to_str().unwrap(), "--strict"]).status.success());
    let r = read(&out);
    assert_eq!(r["scenario"]["group"]["factors"][0], 24);
    assert_eq!(r["all_checks_pass"], true);
}

#[test]
fn dense_operator_from_data_file() {
    let dir = tempfile::tempdir().unwrap();
    // 4-point group, n = 1: dense 4×4 identity as little-endian (re, im) pairs
    let mut bytes = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            let re: f64 = if i == j { 2.0 } else { 0.0 };
            bytes.extend_from_slice(&re.to_le_bytes());
            bytes.extend_from_slice(&0.0f64.to_le_bytes());
        }
    }
    fs::write(dir.path().join("op.bin"), bytes).unwrap();
    let sc = dir.path().join("s.json");
    fs::write(
        &sc,
        r#"{"group":{"factors":[4]},"n":1,
            "atoms":{"a":{"window":"indicator","set":[0]}},
            "window_sets":{"w":[[["a"]]]},
            "operators":{"t":{"kind":"dense","data_file":"op.bin"}},
            "tasks":[{"task":"theta_bounds","windows":"w","theta":"t"}]}"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let st = gof(&["run", "--scenario", sc.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let r = read(&out);
    assert!((r["results"]["tasks"][0]["theta_norm"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}
