use std::path::Path;
use std::process::{Command, Output};

use oculomotor::table::read_feature_table_file;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_oculomotor"));
    c.env("RUST_LOG", "warn");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn oculomotor")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn synth(dir: &Path, subjects: usize, durations: &str, extra: &[&str]) {
    let n = subjects.to_string();
    let mut args = vec![
        "synth",
        "--out",
        dir.to_str().unwrap(),
        "--seed",
        "11",
        "--subjects",
        &n,
        "--durations",
        durations,
    ];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

fn csv_count(dir: &Path) -> usize {
    std::fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .count()
}

#[test]
fn full_cohort_table_and_partial_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let rec = tmp.path().join("rec");
    synth(&rec, 24, "20,20,20", &[]);
    assert_eq!(csv_count(&rec), 72);
    assert!(rec.join("S01_baseline.truth.json").exists());

    let table = tmp.path().join("features.csv");
    let o = run(&["extract", "--input", rec.to_str().unwrap(), "--out", table.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&table).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), 33);
    assert_eq!(lines.count(), 72);

    std::fs::write(rec.join("S07_ride.csv"), "t,gaze2d_x\n0,abc\n").unwrap();
    let o = run(&["extract", "--input", rec.to_str().unwrap(), "--out", table.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("S07_ride.csv"));
    assert_eq!(read_feature_table_file(&table).unwrap().len(), 71);
}

#[test]
fn empty_directory_is_fatal() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["extract", "--input", tmp.path().to_str().unwrap(), "--out", "unused.csv"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no recordings found"));
}

#[test]
fn incomplete_subject_is_excluded_and_logged() {
    let tmp = tempfile::tempdir().unwrap();
    let rec = tmp.path().join("rec");
    synth(&rec, 3, "10,10,10", &[]);
    std::fs::remove_file(rec.join("S02_fog.csv")).unwrap();
    let table = tmp.path().join("t.csv");
    let o = run(&["extract", "--input", rec.to_str().unwrap(), "--out", table.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("excluded subject S02"));
    let rows = read_feature_table_file(&table).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.subject_id != "S02"));
}

#[test]
fn stats_report_is_stable_and_finds_blink_effect() {
    let tmp = tempfile::tempdir().unwrap();
    let rec = tmp.path().join("rec");
    synth(&rec, 12, "120,120,120", &["--effect", "fog:blink_rate=3"]);
    let table = tmp.path().join("features.csv");
    let o = run(&["extract", "--input", rec.to_str().unwrap(), "--out", table.to_str().unwrap()]);
    assert_eq!(code(&o), 0);

    let r1 = tmp.path().join("r1.json");
    let r2 = tmp.path().join("r2.json");
    for r in [&r1, &r2] {
        let o = run(&["stats", "--input", table.to_str().unwrap(), "--out", r.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let b1 = std::fs::read(&r1).unwrap();
    assert_eq!(b1, std::fs::read(&r2).unwrap());

    let text = String::from_utf8(b1.clone()).unwrap();
    let top: Vec<&str> = text
        .lines()
        .filter_map(|l| l.strip_prefix("  \"").and_then(|r| r.split('"').next()))
        .collect();
    assert_eq!(top, ["n_subjects", "subjects", "alpha", "d_bands", "features", "posthoc"]);
    let report: serde_json::Value = serde_json::from_slice(&b1).unwrap();
    assert_eq!(report["features"].as_array().unwrap().len(), 31);
    let hit = report["posthoc"].as_array().unwrap().iter().any(|row| {
        row["parameter"] == "blink_rate" && row["condition"] == "Ride vs Fog"
    });
    assert!(hit, "{}", serde_json::to_string_pretty(&report["posthoc"]).unwrap());
}

#[test]
fn stats_errors_are_fatal() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "subject,condition\nS01,Ride\n").unwrap();
    let out = tmp.path().join("r.json");
    let o = run(&["stats", "--input", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed feature table"));

    let rec = tmp.path().join("rec");
    synth(&rec, 3, "10,10,10", &[]);
    let table = tmp.path().join("t.csv");
    run(&["extract", "--input", rec.to_str().unwrap(), "--out", table.to_str().unwrap()]);
    let o = run(&["stats", "--input", table.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("complete subjects"));
    assert!(!out.exists());
}

#[test]
fn plot_data_matches_table() {
    let tmp = tempfile::tempdir().unwrap();
    let rec = tmp.path().join("rec");
    synth(&rec, 4, "15,15,15", &[]);
    let table = tmp.path().join("t.csv");
    run(&["extract", "--input", rec.to_str().unwrap(), "--out", table.to_str().unwrap()]);
    let plots = tmp.path().join("plots");
    let o = run(&["plot-data", "--input", table.to_str().unwrap(), "--out", plots.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_count(&plots), 31);

    let rows = read_feature_table_file(&table).unwrap();
    for (k, def) in oculomotor::feature_names().iter().enumerate() {
        let text = std::fs::read_to_string(plots.join(format!("{}.csv", def.name))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("subject,condition,value"));
        let expected: Vec<(String, String, u64)> = rows
            .iter()
            .filter_map(|r| r.values[k].map(|v| (r.subject_id.clone(), r.condition.to_string(), v.to_bits())))
            .collect();
        let got: Vec<(String, String, u64)> = lines
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[0].to_string(), f[1].to_string(), f[2].parse::<f64>().unwrap().to_bits())
            })
            .collect();
        assert_eq!(got, expected, "{}", def.name);
    }
}

#[test]
fn jobs_flag_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let rec = tmp.path().join("rec");
    synth(&rec, 3, "20,20,20", &[]);
    let t1 = tmp.path().join("t1.csv");
    let t2 = tmp.path().join("t2.csv");
    run(&["extract", "--jobs", "1", "--input", rec.to_str().unwrap(), "--out", t1.to_str().unwrap()]);
    run(&["extract", "--jobs", "3", "--input", rec.to_str().unwrap(), "--out", t2.to_str().unwrap()]);
    assert_eq!(std::fs::read(&t1).unwrap(), std::fs::read(&t2).unwrap());
}

#[test]
fn bad_flags_are_rejected() {
    let o = run(&["extract", "--input", ".", "--out", "x.csv", "--screen", "1920"]);
    assert_ne!(code(&o), 0);
    let o = run(&["stats", "--input", "x.csv", "--out", "y.json", "--d-bands", "0.5,0.2,0.8,1.2,2.0"]);
    assert_ne!(code(&o), 0);
}
