use std::path::Path;
use std::process::{Command, Output};

fn stiefelgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stiefelgen")).args(args).output().unwrap()
}

fn read_numbers(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| l.split(',').map(|f| f.parse::<f64>().ok()).collect::<Option<Vec<_>>>())
        .collect()
}

fn write_series(path: &Path, header: Option<&str>, values: &[f64]) {
    let mut text = header.map(|h| format!("{h}\r\n")).unwrap_or_default();
    for v in values {
        text.push_str(&format!("{v:.17e}\r\n"));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn every_subcommand_has_help() {
    for cmd in ["augment", "geodesic", "batch", "sphere", "dmd-fit", "dmd-ensemble", "fboxplot", "shm-demo"] {
        let out = stiefelgen(&[cmd, "--help"]);
        assert!(out.status.success(), "{cmd}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    assert_eq!(stiefelgen(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(stiefelgen(&["augment", "--beta", "abc"]).status.code(), Some(2));
    assert_eq!(stiefelgen(&["augment"]).status.code(), Some(2));
    assert_eq!(stiefelgen(&["augment", "--in", "/no/such/file.csv"]).status.code(), Some(2));
    let domain = stiefelgen(&["augment", "--fixture", "steam", "--beta", "1.5"]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&domain.stderr).contains("beta"));
}

#[test]
fn malformed_csv_names_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "value\n1.0\n2.0\nnope\n").unwrap();
    let out = stiefelgen(&["augment", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 4, column 1"));
}

#[test]
fn augment_keeps_the_row_count_and_reports_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("steam.csv");
    let values: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.05).sin() + 0.1 * (i as f64 * 0.7).cos()).collect();
    write_series(&input, Some("value"), &values);
    let gen = dir.path().join("gen.csv");
    let out = stiefelgen(&[
        "augment", "--in", input.to_str().unwrap(), "--rows", "50", "--beta", "0.4", "--smooth", "5", "--seed", "7",
        "--out", gen.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().count(), 1);
    assert!(stderr.contains("1000x1") && stderr.contains("seed=7"));
    assert_eq!(read_numbers(&gen).len(), 1000);
}

#[test]
fn zero_beta_returns_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("x.csv");
    let values: Vec<f64> = (0..600).map(|i| (i as f64 / 9.0).cos() * 3.0 + 1.0).collect();
    write_series(&input, None, &values);
    let gen = dir.path().join("gen.csv");
    let out = stiefelgen(&[
        "augment", "--in", input.to_str().unwrap(), "--rows", "20", "--beta", "0", "--smooth", "1", "--out",
        gen.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let back = read_numbers(&gen);
    assert_eq!(back.len(), values.len());
    for (row, v) in back.iter().zip(&values) {
        assert!((row[0] - v).abs() < 1e-10);
    }
}

#[test]
fn columns_are_augmented_independently() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("two.csv");
    let mut text = String::from("a,b\n");
    for i in 0..400 {
        let t = i as f64 * 0.1;
        text.push_str(&format!("{},{}\n", t.sin(), t.sin()));
    }
    std::fs::write(&input, text).unwrap();
    let gen = dir.path().join("gen.csv");
    assert!(stiefelgen(&["augment", "--in", input.to_str().unwrap(), "--rows", "20", "--out", gen.to_str().unwrap()]).status.success());
    let rows = read_numbers(&gen);
    assert_eq!(rows.len(), 400);
    assert!(rows.iter().all(|r| r.len() == 2));
    // identical input columns get different draws
    assert!(rows.iter().any(|r| r[0] != r[1]));
}

#[test]
fn dmd_ensemble_file_layout() {
    let dir = tempfile::tempdir().unwrap();
    let ens = dir.path().join("ens.csv");
    let out = stiefelgen(&[
        "dmd-ensemble", "--fixture", "spatiotemporal", "--rank", "2", "--beta", "0.2", "--count", "30", "--out",
        ens.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&ens).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("member,time,x0,"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 30 * 200);
    assert_eq!(rows[0].split(',').count(), 2 + 400);
    assert!(rows.last().unwrap().starts_with("29,"));
}

#[test]
fn dmd_fit_json_reports_the_frequencies() {
    let out = stiefelgen(&["dmd-fit", "--fixture", "spatiotemporal"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let freqs: Vec<f64> = v["omegas"].as_array().unwrap().iter().map(|w| w["im"].as_f64().unwrap()).collect();
    assert!((freqs[0] - 2.3).abs() < 1e-6 && (freqs[1] - 2.8).abs() < 1e-6);
    assert!(v["reconstruction_error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn fboxplot_flags_a_spike() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("curves.csv");
    // columns are curves
    let mut text = String::new();
    for s in 0..20 {
        let mut row: Vec<String> = (0..9).map(|i| format!("{}", i as f64 * 0.1)).collect();
        row.push(if s == 10 { "50".into() } else { "0.8".into() });
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(&input, text).unwrap();
    let out = stiefelgen(&["fboxplot", "--in", input.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outlier_indices"], serde_json::json!([9]));
    assert_eq!(v["regions"].as_array().unwrap().len(), 2);
}

#[test]
fn thread_cap_must_be_a_positive_integer() {
    let run = |value: &str| {
        Command::new(env!("CARGO_BIN_EXE_stiefelgen"))
            .args(["sphere", "--fixture", "steam"])
            .env("STIEFELGEN_THREADS", value)
            .output()
            .unwrap()
    };
    assert_eq!(run("zero").status.code(), Some(2));
    assert_eq!(run("0").status.code(), Some(2));
    assert!(run("1").status.success());
}

#[test]
fn batch_output_does_not_depend_on_thread_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_stiefelgen"))
            .args(["batch", "--fixture", "steam", "--count", "5", "--seed", "3"])
            .env("STIEFELGEN_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}
