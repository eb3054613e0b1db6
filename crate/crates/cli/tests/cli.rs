use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_successopt"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = run(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "error output must be one line: {err:?}");
    assert!(err.starts_with("error["), "{err:?}");
    err
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Two-cause dataset in which every project succeeded.
fn single_class_csv(dir: &Path) -> PathBuf {
    let path = dir.join("single.csv");
    fs::write(&path, "C1,C2,outcome\n1,2,1\n3,4,1\n5,6,1\n").unwrap();
    path
}

fn two_cause_catalog(dir: &Path) -> PathBuf {
    let path = dir.join("catalog.txt");
    fs::write(&path, "C1,First\nC2,Second\n").unwrap();
    path
}

#[test]
fn train_writes_model_and_summary() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&["train", "--data", "builtin", "--model", "nbc", "--out", s(dir.path())]);
    assert!(stdout.contains("Naive-Bayes: 500 rows"));
    let model = json(&dir.path().join("nbc.model.json"));
    assert_eq!(model["model"]["kind"], "nbc");
    assert_eq!(model["cause_ids"].as_array().unwrap().len(), 19);
    let summary = json(&dir.path().join("train.summary.json"));
    assert_eq!(summary["training"][0]["rows"], 500);
    assert_eq!(summary["config"]["model"], "nbc");
    assert!(!dir.path().join("lr.model.json").exists());
}

#[test]
fn train_single_class_dataset_is_rejected() {
    let dir = TempDir::new().unwrap();
    let data = single_class_csv(dir.path());
    let catalog = two_cause_catalog(dir.path());
    let err = fails(&["train", "--data", s(&data), "--catalog", s(&catalog), "--out", s(dir.path())]);
    assert!(err.starts_with("error[model.single_class]"), "{err}");
    assert!(err.contains("single-class dataset"), "{err}");
    assert!(!dir.path().join("nbc.model.json").exists());
}

#[test]
fn alpha_zero_reaches_model_file() {
    let dir = TempDir::new().unwrap();
    ok(&["train", "--data", "builtin", "--model", "nbc", "--alpha", "0", "--out", s(dir.path())]);
    let model = json(&dir.path().join("nbc.model.json"));
    assert_eq!(model["model"]["alpha"].as_f64(), Some(0.0));
}

#[test]
fn optimize_report_has_summary_fields() {
    let dir = TempDir::new().unwrap();
    let out = s(dir.path());
    ok(&["train", "--data", "builtin", "--model", "nbc", "--out", out]);
    ok(&["optimize", "--model", "nbc", "--out", out, "--format", "json,csv,text"]);
    let report = json(&dir.path().join("optimize.nbc.report.json"));
    let row = &report["runs"][0];
    assert_eq!(row["generations"], 100);
    for field in [
        "initial_success_probability",
        "ending_success_probability",
        "change_in_probability",
        "initial_cost",
        "ending_cost",
        "change_in_cost",
    ] {
        assert!(row[field].is_number(), "missing {field}");
    }
    assert_eq!(report["config"]["ga"]["population_size"], 50);
    let csv = fs::read_to_string(dir.path().join("optimize.nbc.report.csv")).unwrap();
    assert!(csv.starts_with("model,generations,initial_success_probability"));
    let text = fs::read_to_string(dir.path().join("optimize.nbc.report.txt")).unwrap();
    assert!(text.contains('%') && text.contains("Effective configuration"));
    let trace = fs::read_to_string(dir.path().join("optimize.nbc.trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("generation,best_efficacy,mean_efficacy,best_probability,best_norm_cost"));
    assert_eq!(trace.lines().count(), 1 + 101);
}

#[test]
fn same_seed_gives_byte_identical_reports() {
    // the effective config is embedded in reports, so both runs use the same relative --out
    let runs: Vec<TempDir> = (0..2).map(|_| TempDir::new().unwrap()).collect();
    for dir in &runs {
        let out = bin()
            .current_dir(dir.path())
            .args(["optimize", "--train-first", "--data", "builtin", "--seed", "7", "--out", "out", "--format"])
            .arg("json,csv,text")
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let dirs: Vec<PathBuf> = runs.iter().map(|d| d.path().join("out")).collect();
    let mut names: Vec<_> = fs::read_dir(&dirs[0]).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 10);
    for name in names {
        let a = fs::read_to_string(dirs[0].join(&name)).unwrap();
        let b = fs::read_to_string(dirs[1].join(&name)).unwrap();
        assert!(a == b, "{name:?} differs");
    }
}

#[test]
fn zero_generations_reports_initial_population() {
    let dir = TempDir::new().unwrap();
    ok(&[
        "optimize", "--train-first", "--data", "builtin", "--model", "nbc", "--generations", "0", "--out",
        s(dir.path()),
    ]);
    let row = &json(&dir.path().join("optimize.nbc.report.json"))["runs"][0];
    assert_eq!(row["generations"], 0);
    assert_eq!(row["initial_success_probability"], row["ending_success_probability"]);
    assert_eq!(row["initial_cost"], row["ending_cost"]);
    assert_eq!(row["change_in_probability"].as_f64(), Some(0.0));
    let trace = fs::read_to_string(dir.path().join("optimize.nbc.trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2);
}

#[test]
fn optimize_without_model_fails_fast() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fresh");
    let err = fails(&["optimize", "--model", "lr", "--out", s(&out)]);
    assert!(err.starts_with("error[io]") && err.contains("lr.model.json"), "{err}");
    assert!(!out.exists());
}

#[test]
fn optimize_accepts_explicit_model_file() {
    let dir = TempDir::new().unwrap();
    ok(&["train", "--data", "builtin", "--model", "lr", "--out", s(dir.path())]);
    let model = dir.path().join("lr.model.json");
    let out = dir.path().join("opt");
    ok(&["optimize", "--model-file", s(&model), "--generations", "3", "--out", s(&out)]);
    assert!(out.join("optimize.lr.report.json").exists());
    assert!(out.join("lr.result.json").exists());
}

#[test]
fn synth_is_deterministic_and_valid() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    ok(&["synth", "--rows", "500", "--seed", "1", "--out", s(&a)]);
    ok(&["synth", "--rows", "500", "--seed", "1", "--out", s(&b)]);
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 501);
    // the generated file trains like any other dataset
    ok(&["train", "--data", s(&a), "--model", "nbc", "--out", s(dir.path())]);
}

#[test]
fn synth_matches_bundled_fixture() {
    let stdout = ok(&["synth", "--rows", "500", "--seed", "1"]);
    assert_eq!(stdout, successopt::pipeline::BUNDLED_SURVEY_CSV);
}

#[test]
fn synth_rejects_single_row() {
    let err = fails(&["synth", "--rows", "1"]);
    assert!(err.starts_with("error[dataset.too_few_rows]"), "{err}");
}

#[test]
fn synth_honours_custom_effects() {
    let dir = TempDir::new().unwrap();
    let catalog = two_cause_catalog(dir.path());
    let stdout = ok(&[
        "synth", "--rows", "50", "--catalog", s(&catalog), "--effects", "0,0", "--intercept", "20", "--noise", "0",
    ]);
    assert!(stdout.lines().skip(1).all(|l| l.ends_with(",1")));
    let err = fails(&["synth", "--catalog", s(&catalog), "--effects", "1,2,3"]);
    assert!(err.starts_with("error[dataset.invalid]"), "{err}");
}

#[test]
fn compare_reference_best_fitness_rows() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&[
        "compare",
        "--a",
        s(&fixture("table4_nbc_fitness.csv")),
        "--b",
        s(&fixture("table6_lr_fitness.csv")),
        "--out",
        s(dir.path()),
        "--format",
        "json,csv",
    ]);
    assert!(stdout.contains("rho = 0.955"), "{stdout}");
    let report = json(&dir.path().join("compare.json"));
    let rho = report["spearman"]["rho"].as_f64().unwrap();
    assert!((rho - 0.9552387738283168).abs() < 1e-9);
    let t = report["t_test"]["equal_variances"]["t"].as_f64().unwrap();
    assert!((t - 1.2952955507784756).abs() < 1e-9);
    let nbc_ranks: Vec<f64> = serde_json::from_value(report["ranks"][0].clone()).unwrap();
    assert_eq!(nbc_ranks, [3., 3., 8., 5., 6., 1., 8., 4., 4., 2., 2., 6., 4., 5., 7., 8., 7., 4., 8.]);
    let csv = fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    assert!(csv.starts_with("cause,GA-NBC_fitness,GA-LR_fitness,GA-NBC_rank,GA-LR_rank\nC1,7,8,3,1\n"));
}

#[test]
fn compare_identical_inputs_gives_unit_rho() {
    let f = fixture("table4_nbc_fitness.csv");
    let stdout = ok(&["compare", "--a", s(&f), "--b", s(&f)]);
    assert!(stdout.contains("rho = 1.000"), "{stdout}");
}

#[test]
fn compare_reference_ranks_directly() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    fs::write(&a, "3,3,8,5,6,1,8,4,4,2,2,6,4,5,7,8,7,4,8\n").unwrap();
    fs::write(&b, "1,2,7,4,5,2,7,3,3,1,1,6,4,4,5,9,5,2,7\n").unwrap();
    let stdout = ok(&["compare", "--ranks", "--a", s(&a), "--b", s(&b)]);
    assert!(stdout.contains("1.195") && stdout.contains("0.89474"), "{stdout}");
}

#[test]
fn compare_mismatched_catalogs() {
    let err = fails(&["compare", "--a", s(&fixture("table4_nbc_fitness.csv")), "--b", s(&fixture("five_causes.csv"))]);
    assert!(err.starts_with("error[analysis.catalog_mismatch]"), "{err}");
}

#[test]
fn compare_run_results_from_optimize() {
    let dir = TempDir::new().unwrap();
    let out = s(dir.path());
    ok(&["optimize", "--train-first", "--data", "builtin", "--generations", "5", "--out", out]);
    let stdout = ok(&[
        "compare",
        "--a",
        s(&dir.path().join("nbc.result.json")),
        "--b",
        s(&dir.path().join("lr.result.json")),
    ]);
    assert!(stdout.contains("Spearman rank correlation"));
}

#[test]
fn run_both_models_writes_consolidated_report() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&["run", "--data", "builtin", "--generations", "20", "--out", s(dir.path())]);
    assert!(stdout.contains("Spearman rank correlation"));
    let report = json(&dir.path().join("run.report.json"));
    assert_eq!(report["optimization"].as_array().unwrap().len(), 2);
    assert!(report["comparison"].is_object());
    assert_eq!(report["config"]["ga"]["max_iterations"], 20);
    for f in ["nbc.model.json", "lr.model.json", "nbc.result.json", "optimize.lr.trace.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn run_single_model_omits_comparison() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&["run", "--data", "builtin", "--model", "nbc", "--generations", "5", "--out", s(dir.path())]);
    assert!(stdout.contains("comparison omitted"));
    let report = json(&dir.path().join("run.report.json"));
    assert!(report["comparison"].is_null());
    assert!(report["comparison_note"].as_str().unwrap().contains("both"));
}

#[test]
fn run_missing_data_fails_before_training() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("never");
    let missing = dir.path().join("nope.csv");
    let err = fails(&["run", "--data", s(&missing), "--out", s(&out)]);
    assert!(err.starts_with("error[io]") && err.contains("nope.csv"), "{err}");
    assert!(!out.exists());
    let err = fails(&["run", "--out", s(&out)]);
    assert!(err.starts_with("error[config]") && err.contains("--data"), "{err}");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# settings\ndata = builtin\nmodel = nbc\ngenerations = 3\nseed = 11\n").unwrap();
    ok(&["run", "--config", s(&cfg), "--generations", "2", "--out", s(dir.path())]);
    let report = json(&dir.path().join("run.report.json"));
    assert_eq!(report["config"]["ga"]["max_iterations"], 2);
    assert_eq!(report["config"]["ga"]["seed"], 11);
    assert_eq!(report["config"]["model"], "nbc");
}

#[test]
fn invalid_settings_are_reported() {
    let err = fails(&["run", "--data", "builtin", "--population", "1"]);
    assert!(err.starts_with("error[ga.invalid]"), "{err}");
    let err = fails(&["run", "--data", "builtin", "--model", "svm"]);
    assert!(err.starts_with("error[config]"), "{err}");
    let err = fails(&["run", "--bogus-flag"]);
    assert!(err.starts_with("error[usage]"), "{err}");
}

#[test]
fn rank_prints_dense_ranks() {
    let stdout = ok(&["rank", "--values", "7,7,2,5,4,9,2,6,6,8,8,4,6,5,3,2,3,6,2"]);
    assert_eq!(stdout, "3,3,8,5,6,1,8,4,4,2,2,6,4,5,7,8,7,4,8\n");
    let stdout = ok(&["rank", "--input", s(&fixture("five_causes.csv"))]);
    assert_eq!(stdout, "C1,C2,C3,C4,C5\n5,4,3,2,1\n");
}

#[test]
fn dump_cost_table_prints_builtin() {
    let stdout = ok(&["dump-cost-table"]);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("cause,EL,VL,L,SL,N,SH,MH,VH,EH"));
    assert_eq!(lines.next(), Some("C1,2,3,3,4,5,6,6,7,8"));
    assert_eq!(stdout.lines().count(), 20);
}
