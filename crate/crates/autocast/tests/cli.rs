use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn autocast(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_autocast")).args(args).current_dir(cwd).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn help_and_version_succeed() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&autocast(&["--help"], tmp.path())), 0);
    assert_eq!(code(&autocast(&["--version"], tmp.path())), 0);
}

#[test]
fn usage_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&autocast(&[], tmp.path())), 1);
    assert_eq!(code(&autocast(&["frobnicate"], tmp.path())), 1);
    assert_eq!(code(&autocast(&["validate", "--seed", "x"], tmp.path())), 1);
}

#[test]
fn bad_inputs_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("bad.csv"), "product_id,date,quantity\na,2020-01-01,seven\n").unwrap();
    fs::write(dir.join("bad.json"), r#"{"horizon": 0}"#).unwrap();
    fs::write(dir.join("ok.csv"), "product_id,date,quantity\na,2020-01-01,1\n").unwrap();

    let out = autocast(&["validate", "--input", "missing.csv", "--out", "o"], dir);
    assert_eq!(code(&out), 1);

    let out = autocast(&["validate", "--input", "bad.csv", "--out", "o"], dir);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = autocast(&["forecast", "--input", "ok.csv", "--config", "bad.json", "--out", "o"], dir);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon"));

    let out = autocast(&["validate", "--input", "ok.csv"], dir);
    assert_eq!(code(&out), 1);

    fs::write(dir.join("spec.json"), r#"[{"product_id":"a","kind":"Wobbly"}]"#).unwrap();
    assert_eq!(code(&autocast(&["synth", "--spec", "spec.json", "--out", "s.csv"], dir)), 1);
}

#[test]
fn synth_forecast_evaluate_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(
        dir.join("spec.json"),
        r#"{"seed": 3, "products": [
            {"product_id": "alpha", "kind": "Seasonality", "length": 42},
            {"product_id": "beta", "kind": "SeasonalityTrend", "length": 42},
            {"product_id": "gamma", "kind": "ShortHistory"}
        ]}"#,
    )
    .unwrap();
    fs::write(
        dir.join("config.json"),
        r#"{"models": ["HWES", "SES", "GAM", "BoostedTree", "EnsembleMedian", "Naive"], "horizon": 6, "workers": 1}"#,
    )
    .unwrap();
    let out = autocast(&["synth", "--spec", "spec.json", "--out", "sales.csv"], dir);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let out = autocast(&["forecast", "--seed", "9", "--input", "sales.csv", "--config", "config.json", "--out", "fc"], dir);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["forecasts.csv", "validation.csv", "summary.json", "decomposition_alpha.svg"] {
        assert!(dir.join("fc").join(name).exists(), "{name}");
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("fc/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 9);
    assert_eq!(summary["products"]["total"], 3);

    let out = autocast(&["evaluate", "--forecasts", "fc", "--actuals", "sales.csv", "--out", "ev", "--alternative", "less"], dir);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let eval: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("ev/evaluation.json")).unwrap()).unwrap();
    assert_eq!(eval["alternative"], "less");
    // The actuals end where the forecasts begin, so nothing overlaps.
    assert_eq!(eval["products_scored"], 0);
}
