use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectral-lab"))
        .args(args)
        .env("SPECTRAL_LAB_OUT_DIR", dir)
        .current_dir(dir)
        .output()
        .expect("spawn binary")
}

fn json_run(args: &[&str], dir: &Path) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let out = bin(&full, dir);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: Value = serde_json::from_slice(&out.stdout).expect("valid json");
    assert_eq!(doc["command"], args[0]);
    assert!(doc["result"].is_object(), "{args:?}");
    let repro = &doc["reproducibility"];
    for key in [
        "program",
        "version",
        "command",
        "seed",
        "threads",
        "argv",
        "parameters",
        "elapsed_seconds",
    ] {
        assert!(!repro[key].is_null(), "{args:?} missing {key}");
    }
    doc
}

#[test]
fn every_subcommand_emits_json_with_stanza() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    json_run(
        &[
            "f1d",
            "--profile",
            "tent:0.3",
            "--oracle",
            "--oracle-points",
            "500",
        ],
        d,
    );
    json_run(&["triangle-ratio", "--x0", "0.4"], d);
    json_run(&["bounds", "--grid", "200"], d);
    json_run(&["geom", "--shape", "T1"], d);
    json_run(&["fem", "--shape", "square", "--hmax", "0.2"], d);
    json_run(
        &[
            "thin",
            "--profile",
            "const",
            "--eps",
            "0.2,0.1,0.05",
            "--columns",
            "24",
            "--layers",
            "4",
        ],
        d,
    );
    json_run(&["variation-check", "--random", "1"], d);
    json_run(
        &[
            "optimize-h",
            "--knots",
            "7",
            "--restarts",
            "2",
            "--max-evaluations",
            "60",
            "--elements",
            "128",
        ],
        d,
    );
    json_run(&["diagram", "--family", "named", "--hmax", "0.1"], d);
}

#[test]
fn twelve_significant_digits_in_output() {
    let dir = tempfile::tempdir().unwrap();
    let doc = json_run(&["f1d", "--profile", "const"], dir.path());
    let mu = doc["result"]["result"]["mu1"].as_f64().unwrap();
    assert_eq!(mu, 9.86960440109);
    let text = String::from_utf8(bin(&["f1d", "--profile", "const"], dir.path()).stdout).unwrap();
    assert!(text.contains("9.86960440109"), "{text}");
    assert!(text.contains("# reproducibility"));
}

#[test]
fn seed_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str| {
        let d = json_run(
            &[
                "diagram",
                "--family",
                "randomPolygon",
                "--n",
                "3",
                "--hmax",
                "0.1",
                "--seed",
                seed,
            ],
            dir.path(),
        );
        d["result"]["report"].clone()
    };
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(bin(&[], d).status.code(), Some(1));
    assert_eq!(bin(&["nonsense"], d).status.code(), Some(1));
    assert_eq!(bin(&["f1d"], d).status.code(), Some(1));
    assert_eq!(
        bin(&["f1d", "--profile", "missing.json"], d).status.code(),
        Some(1)
    );
    assert_eq!(
        bin(&["f1d", "--profile", "tent:abc"], d).status.code(),
        Some(1)
    );
    assert_eq!(
        bin(&["diagram", "--family", "blob"], d).status.code(),
        Some(1)
    );
    assert_eq!(
        bin(&["optimize-h", "--mode", "sideways"], d).status.code(),
        Some(1)
    );
    assert_eq!(bin(&["bounds", "--grid", "10"], d).status.code(), Some(1));
    std::fs::write(d.join("line.json"), r#"{"vertices":[[0,0],[1,0],[2,0]]}"#).unwrap();
    assert_eq!(
        bin(&["geom", "--shape", "line.json"], d).status.code(),
        Some(1)
    );
    assert_eq!(bin(&["--help"], d).status.code(), Some(0));
}

#[test]
fn computation_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("zero.json"), r#"{"knots":[0,1],"values":[0,0]}"#).unwrap();
    let out = bin(&["f1d", "--profile", "zero.json", "--json"], d);
    assert_eq!(out.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["error"].as_str().unwrap().contains("zero"));
    assert!(doc["reproducibility"].is_object());
}

#[test]
fn files_written_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = bin(
        &[
            "diagram", "--family", "named", "--hmax", "0.1", "--csv", "pts.csv", "--svg", "pts.svg",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(d.join("pts.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("id,")));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 4);
    assert!(std::fs::read_to_string(d.join("pts.svg"))
        .unwrap()
        .starts_with("<svg"));
    let out = bin(&["bounds", "--grid", "100", "--csv", "tau.csv"], d);
    assert_eq!(out.status.code(), Some(0));
    assert!(d.join("tau.csv").exists());

    let out_dir = d.join("results");
    std::fs::create_dir(&out_dir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_spectral-lab"))
        .args(["bounds", "--grid", "100", "--csv", "tau.csv"])
        .arg("--out-dir")
        .arg(&out_dir)
        .current_dir(d)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out_dir.join("tau.csv").exists());
    let out = Command::new(env!("CARGO_BIN_EXE_spectral-lab"))
        .args([
            "optimize-h",
            "--knots",
            "5",
            "--restarts",
            "1",
            "--max-evaluations",
            "30",
            "--elements",
            "64",
        ])
        .arg("--out-dir")
        .arg(&out_dir)
        .current_dir(d)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("optimize-h-best.json").exists());
}
