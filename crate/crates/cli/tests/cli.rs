//! End-to-end tests of the `kakutani` binary: exit-code contract,
//! determinism under fixed seeds, and the figure pipeline's file outputs.

use std::process::Command;

fn kakutani() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kakutani"))
}

#[test]
fn simulate_zero_steps() {
    let out = kakutani().args(["simulate", "--n", "0"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("n = 0"));
    assert!(text.contains("M_n = 1."));
    assert!(text.contains("m_n = 1."));
}

#[test]
fn simulate_is_deterministic() {
    let run = || kakutani().args(["simulate", "--n", "2", "--seed", "7"]).output().unwrap();
    let (a, b) = (run(), run());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_million_splits_hits_slln_window() {
    let out = kakutani().args(["simulate", "--n", "1000000"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let max_line = text.lines().find(|l| l.starts_with("M_n = ")).unwrap();
    let value: f64 = max_line.trim_start_matches("M_n = ").parse().unwrap();
    let n = 1.0e6;
    assert!(value >= 1.5 / n && value <= 3.0 / n, "M_n = {}", value);
}

#[test]
fn thresholds_above_one_cross_immediately() {
    let out = kakutani().args(["thresholds", "--thresholds", "1.5"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("N_1.5 = 0"));
}

#[test]
fn usage_errors_exit_2() {
    let out = kakutani().args(["simulate", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = kakutani().args(["nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_1() {
    let out = kakutani().args(["moments", "--t", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("error"), "stderr: {}", err);
}

#[test]
fn moments_table_prints_closed_forms() {
    let out = kakutani().args(["moments", "--t", "0.5"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3.00000000"), "{}", text);
    assert!(text.contains("1.09035489"), "{}", text);
}

#[test]
fn embeddings_prints_samples() {
    let out = kakutani()
        .args(["embeddings", "--n", "40", "--samples", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("population counts"));
    assert!(text.contains("parking counts"));
    assert!(text.contains("walk extremes"));
}

#[test]
fn figure1_ci_writes_all_formats() {
    let dir = std::env::temp_dir().join(format!("kakutani-fig1-{}", std::process::id()));
    let out = kakutani()
        .args(["figure1", "--profile", "ci", "--out", dir.to_str().unwrap()])
        .env("KAKUTANI_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("left panel"));
    assert!(stdout.contains("right panel"));

    let csv = std::fs::read_to_string(dir.join("figure1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3, "2 panels x 3 sizes");

    // JSON round-trips and matches the CSV contents
    let left: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("figure1_left.json")).unwrap())
            .unwrap();
    assert_eq!(left["statistic"], "max_gap_clt");
    assert_eq!(left["per_size"].as_array().unwrap().len(), 3);
    let mean0 = left["per_size"][0]["mean_log_ks"].as_f64().unwrap();
    assert!(csv.contains(&format!("{}", mean0)));

    let tsv = std::fs::read_to_string(dir.join("figure1_right.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 3);

    std::fs::remove_dir_all(&dir).ok();
}
