use std::path::Path;
use std::process::{Command, Output};

fn vertex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vertex")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn ybe_suite_passes_on_the_first_case() {
    let out = vertex(&["verify", "--suite", "ybe", "--case", "1"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS ybe"));
}

#[test]
fn full_suite_passes_on_every_published_case() {
    for case in ["1", "2", "3", "4", "5"] {
        let out = vertex(&["verify", "--suite", "all", "--case", case, "--draws", "2"]);
        assert_eq!(code(&out), 0, "case {case}:\n{}", stdout(&out));
    }
}

#[test]
fn even_chains_exit_with_invalid_input() {
    for args in [&["verify", "--n", "4"][..], &["spectrum", "--xi", "0.1,0.9"][..]] {
        let out = vertex(args);
        assert_eq!(code(&out), 2);
        assert!(String::from_utf8_lossy(&out.stderr).contains("odd number of sites"));
    }
}

#[test]
fn malformed_input_exits_with_two() {
    assert_eq!(code(&vertex(&["verify", "--suite", "bethe"])), 2);
    assert_eq!(code(&vertex(&["verify", "--t", "1.5"])), 2);
    assert_eq!(code(&vertex(&["verify", "--case", "9"])), 2);
    assert_eq!(code(&vertex(&["verify", "--xi", "0.2,0.2,1.0"])), 2);
    assert_eq!(code(&vertex(&["verify", "--config", "/nonexistent/run.cfg"])), 2);
}

#[test]
fn impossible_tolerance_exits_with_one() {
    let out = vertex(&["verify", "--suite", "qdet", "--tol", "1e-300"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn six_vertex_spectrum_of_the_first_case() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("six.json");
    let out = vertex(&["spectrum", "--model", "6vd", "--json", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v = json(&path);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 8);
    for r in records {
        assert_eq!(r["model"], "6vd");
        assert_eq!(r["source"], "both");
        assert!(r["sign_partner"].is_u64());
    }
}

#[test]
fn eight_vertex_spectrum_is_doubly_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eight.json");
    let out = vertex(&["spectrum", "--model", "8v", "--json", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let records = json(&path)["records"].as_array().unwrap().clone();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|r| r["multiplicity"] == 2));
}

#[test]
fn both_models_report_inclusion_and_lifts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("both.json");
    let csv = dir.path().join("both.csv");
    let out =
        vertex(&["spectrum", "--model", "both", "--json", path.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v = json(&path);
    let records = v["records"].as_array().unwrap();
    let eight: Vec<_> = records.iter().filter(|r| r["model"] == "8v").collect();
    assert_eq!(eight.len(), 4);
    for r in &eight {
        assert!(r["inclusion_distance"].as_f64().unwrap() < 1e-6);
    }
    let lifted = records.iter().filter(|r| r["lifted"] == true).count();
    assert_eq!(lifted, 4);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("model,index,multiplicity"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn json_reports_are_deterministic_and_finite() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = vertex(&["verify", "--suite", "all", "--seed", "9", "--json", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v = json(&a);
    assert_eq!(v["meta"]["seed"], 9);
    assert_eq!(v["meta"]["params"]["n"], 3);
    assert!(v["meta"]["params"]["xi"][0]["re"].is_f64());
    assert!(v["meta"]["version"].is_string());
    assert!(!v["checks"].as_array().unwrap().is_empty());
    let text = String::from_utf8(ta).unwrap();
    assert!(!text.contains("NaN") && !text.contains("inf"));
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let report = dir.path().join("out.json");
    std::fs::write(
        &cfg,
        format!(
            "# five sites\nxi = 0.3, 0.9, 1.5, 2.1, 2.7\neta = 0.45\nt = 0.2\nsuite = qdet\nseed = 4\njson = {}\n",
            report.display()
        ),
    )
    .unwrap();
    let out = vertex(&["verify", "--config", cfg.to_str().unwrap(), "--seed", "6"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v = json(&report);
    assert_eq!(v["meta"]["params"]["n"], 5);
    assert_eq!(v["meta"]["seed"], 6);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["suite"] == "qdet"));
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(code(&vertex(&["verify", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn appendix_reproduction_flags_the_misprint() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("appendix.json");
    let out = vertex(&["reproduce-appendix", "--json", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("known misprint"));
    assert!(text.contains("printed eta = 0.3"));
    let v = json(&path);
    let rows = v["records"].as_array().unwrap();
    assert_eq!(rows.len(), 40);
    let flagged: Vec<_> = rows.iter().filter(|r| !r["typo_cells"].as_array().unwrap().is_empty()).collect();
    assert_eq!(flagged.len(), 1);
    assert_eq!(
        (flagged[0]["case"].clone(), flagged[0]["table"].clone(), flagged[0]["row"].clone()),
        (2.into(), "w".into(), 4.into())
    );
    for r in rows {
        assert!(r["max_deviation"].as_f64().unwrap() < 1e-5);
    }
    let first = rows.iter().find(|r| r["case"] == 1 && r["table"] == "w").unwrap();
    assert!(first["max_deviation"].as_f64().unwrap() < 1e-6);
}

#[test]
fn thread_cap_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_vertex"))
        .args(["verify", "--suite", "ybe"])
        .env("VERTEX_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_vertex"))
        .args(["verify", "--suite", "ybe"])
        .env("VERTEX_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}
