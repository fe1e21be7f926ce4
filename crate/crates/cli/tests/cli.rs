use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn raa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn cost_prints_golden_rows() {
    let out = raa(&["cost"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# artifact=cost"));
    assert!(text.lines().any(|l| l == "raa,1,25,16,7.00,0.0069"));
    assert!(text.lines().any(|l| l == "hbf,1,16,16,1015.20,1.0000"));
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> Vec<(String, Vec<u8>)> {
    let sub = dir.join(name);
    fs::create_dir(&sub).unwrap();
    let out_path = sub.join("run.csv");
    let mut full = args.to_vec();
    let out_str = out_path.to_str().unwrap();
    full.extend(["--out", out_str]);
    let out = raa(&full);
    assert!(out.status.success(), "{}", stderr(&out));
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&sub)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mu.cfg");
    fs::write(&cfg, "m = 8\nsnr_db = -4:4:4\ndump_channels = true\n").unwrap();
    let args = [
        "multi-user",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "3",
        "--seed",
        "77",
        "--methods",
        "greedy,exhaustive,top_magnitude",
    ];
    let a = run_to(dir.path(), "a", &args);
    let b = run_to(dir.path(), "b", &args);
    let names: Vec<&str> = a.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(names, ["run.csv", "run_channels.csv", "run_selections.csv"]);
    assert_eq!(a, b);
    let table = String::from_utf8(a[0].1.clone()).unwrap();
    assert!(table.contains("# seed=77"));
    assert!(table.contains("# trials=3"));
}

#[test]
fn beam_pattern_writes_one_artifact_per_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_to(
        dir.path(),
        "bp",
        &["beam-pattern", "--pattern", "directional"],
    );
    let names: Vec<&str> = files.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(
        names,
        [
            "run.csv",
            "run_beam_hbf_directional.csv",
            "run_beam_raa_directional.csv"
        ]
    );
}

#[test]
fn bad_config_value_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "m = 16\ntrials = many\n").unwrap();
    let out = raa(&["single-user", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.starts_with("raa: error:"), "{err}");
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_config_file_fails() {
    let out = raa(&["cost", "--config", "/nonexistent/raa.cfg"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("cannot read config"));
}

#[test]
fn exhaustive_cap_error_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cap.cfg");
    fs::write(&cfg, "exhaustive_cap = 1000\n").unwrap();
    let out = raa(&[
        "multi-user",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "1",
    ]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("53130") && err.contains("1000"), "{err}");
}

#[test]
fn unknown_method_is_rejected() {
    let out = raa(&["multi-user", "--methods", "greedy,random", "--trials", "1"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--methods"));
}
