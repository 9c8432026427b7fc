use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2census"))
        .args(args)
        .env("CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn census_output_ignores_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let one = run(
        &["census", "--stratum", "H11", "--n", "4..=6", "--threads", "1"],
        a.path(),
    );
    let four = run(
        &["census", "--stratum", "H11", "--n", "4..=6", "--threads", "4"],
        b.path(),
    );
    assert!(one.status.success() && four.status.success());
    // The cache directory is part of the embedded config, so compare files
    // after normalising it away.
    let norm = |dir: &Path| {
        dir_contents(dir)
            .into_iter()
            .map(|(n, bytes)| {
                (
                    n,
                    String::from_utf8(bytes)
                        .unwrap()
                        .replace(&dir.display().to_string(), "<dir>"),
                )
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(norm(a.path()), norm(b.path()));
    assert_eq!(
        stdout(&one).replace(&a.path().display().to_string(), "<dir>"),
        stdout(&four).replace(&b.path().display().to_string(), "<dir>")
    );
}

#[test]
fn census_of_three_squares_in_h2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["census", "--stratum", "H2", "--n", "3"], dir.path());
    assert!(o.status.success());
    let row = stdout(&o).lines().nth(2).unwrap().to_string();
    assert!(row.starts_with("H2,3,3,"), "{row}");
    let manifest = fs::read_to_string(dir.path().join("census-H2-3.manifest.json")).unwrap();
    assert!(manifest.contains("\"command\": \"census\""));
    assert!(manifest.contains("\"tool_version\""));
}

#[test]
fn verify_does_not_write_and_labels_even_d() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify-counts", "--n", "3..=6"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    let out = stdout(&o);
    assert!(out.contains("H11,4,1,0,4,conjecture,true"));
    assert!(out.contains("H11,5,1,1,24,formula,true"));
    assert!(out
        .lines()
        .filter(|l| l.starts_with("H11,3,2,"))
        .all(|l| !l.contains("conjecture")));
}

#[test]
fn corrupt_cache_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["census", "--stratum", "H2", "--n", "5"], dir.path())
        .status
        .success());
    let path = dir.path().join("census-H2-5.jsonl");
    let mut text = fs::read_to_string(&path).unwrap();
    text = text.replacen("\"reduced\":true", "\"reduced\":false", 1);
    fs::write(&path, text).unwrap();
    let o = run(&["verify-counts", "--stratum", "H2", "--n", "5"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("corrupt cache"));
}

#[test]
fn chow_derivation_at_five() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["chow-derive", "--d", "5", "--M", "1", "--eps", "1"], dir.path());
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("derived,12/5,24/5,true"), "{out}");
    for term in ["main(level 2)", "theta_boundary", "dtheta_boundary", "zero_section"] {
        assert!(out.contains(term));
    }
}

#[test]
fn theta_orbits_at_four() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["theta-orbits", "--d", "4", "--format", "json"], dir.path());
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    for name in ["E0", "E2"] {
        let row = rows.iter().find(|r| r["name"] == name).unwrap();
        assert_eq!(row["match"], "true");
    }
    assert_eq!(doc["config"]["d"], 4);
}

#[test]
fn invalid_parameters_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!run(&["chow-derive", "--d", "4", "--M", "1", "--eps", "0"], dir.path())
        .status
        .success());
    assert!(!run(&["theta-orbits", "--d", "2"], dir.path()).status.success());
    assert!(!run(&["census", "--n", "13"], dir.path()).status.success());
}
