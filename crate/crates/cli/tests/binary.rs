use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn ssgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn generate(name: &str, args: &[&str]) -> PathBuf {
    let path = tmp(name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--json", path.to_str().unwrap()]);
    let out = ssgraph(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn gen_to_stdout_matches_gen_to_file() {
    let file = generate("o23_file.json", &["odometer", "--n", "2,3"]);
    let out = ssgraph(&["gen", "odometer", "--n", "2,3"]);
    assert_eq!(out.stdout, fs::read(file).unwrap());
}

#[test]
fn validate_and_analyze_succeed() {
    let model = generate("o23.json", &["odometer", "--n", "2,3"]);
    let m = model.to_str().unwrap();
    let out = ssgraph(&["validate", m]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("valid"));
    let out = ssgraph(&["analyze", m, "--box", "2", "--ball", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("unique KMS state"));
}

#[test]
fn json_reports_are_byte_stable() {
    let model = generate("o22.json", &["odometer", "--n", "2,2"]);
    let m = model.to_str().unwrap();
    for verb in ["analyze", "per", "kms-eval"] {
        let a = ssgraph(&[verb, m, "--box", "2", "--ball", "2", "--json", "-"]);
        let b = ssgraph(&[verb, m, "--box", "2", "--ball", "2", "--json", "-"]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
        let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        assert_eq!(v["schema"], "ssgraph-report/1");
    }
    let per: serde_json::Value =
        serde_json::from_slice(&ssgraph(&["per", m, "--json", "-"]).stdout).unwrap();
    assert_eq!(per["periodicity"]["rank"], 1);
}

#[test]
fn kms_eval_reads_elements() {
    let model = generate("k2.json", &["katsura", "--t", "2", "--b", "1"]);
    let elements = tmp("elements.json");
    fs::write(
        &elements,
        r#"[{"label":"p","terms":[{"mu":{"vertex":0},"nu":{"vertex":0}}]},
            {"label":"e","terms":[{"mu":{"edges":[[1,0]]},"nu":{"edges":[[1,0]]},"re":2.0}]}]"#,
    )
    .unwrap();
    let out = ssgraph(&[
        "kms-eval",
        model.to_str().unwrap(),
        "--trace",
        "haar",
        "--elements",
        elements.to_str().unwrap(),
        "--json",
        "-",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let values = v["evaluations"]["values"].as_array().unwrap();
    assert!((values[0]["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((values[1]["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn invalid_models_exit_2() {
    let model = generate("o23_broken.json", &["odometer", "--n", "2,3"]);
    let mut v: serde_json::Value = serde_json::from_slice(&fs::read(&model).unwrap()).unwrap();
    v["squares"].as_array_mut().unwrap().pop();
    fs::write(&model, serde_json::to_vec(&v).unwrap()).unwrap();
    let out = ssgraph(&["validate", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bijection"));

    let junk = tmp("junk.json");
    fs::write(&junk, "{").unwrap();
    assert_eq!(ssgraph(&["analyze", junk.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn closure_blowup_exits_3() {
    let model = tmp("grow.json");
    fs::write(
        &model,
        r#"{"schema":"ssgraph/1","k":1,"vertices":["v"],
            "edges":[{"id":0,"color":1,"source":0,"range":0},{"id":1,"color":1,"source":0,"range":0}],
            "generators":[{"name":"a","edgeAction":[
              {"edge":[1,0],"image":[1,1],"restriction":[]},
              {"edge":[1,1],"image":[1,0],"restriction":[1,1,1]}]}]}"#,
    )
    .unwrap();
    let out = ssgraph(&["analyze", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("closure"));
}

#[test]
fn io_and_usage_errors_exit_1() {
    assert_eq!(ssgraph(&["validate", "/nonexistent/model.json"]).status.code(), Some(1));
    let model = generate("o2.json", &["odometer", "--n", "2"]);
    let out = ssgraph(&["kms-eval", model.to_str().unwrap(), "--trace", "bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(ssgraph(&["analyze"]).status.code(), Some(1));
    assert_eq!(ssgraph(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ssgraph(&["--help"]).status.code(), Some(0));
}
