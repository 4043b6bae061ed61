//! The `cbcc` binary end to end: run, summarize, curves, and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cbcc(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cbcc"));
    cmd.args(args).env("RUST_LOG", "warn");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write_dataset(dir: &Path) -> String {
    let path = dir.join("toy.csv");
    let mut text = String::new();
    for i in 0..40 {
        let label = if i % 3 == 0 { "spam" } else { "ham" };
        text.push_str(&format!("{},{},{},{label}\n", i % 5, (i * 7) % 11, i % 2));
    }
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn run_summarize_curves() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_dataset(tmp.path());
    let out = tmp.path().join("out");
    let out_s = out.display().to_string();
    let config = tmp.path().join("grid.conf");
    fs::write(&config, "levels = 0.1, 0.9\nreps = 2\nrounds = 50\n# comment\nworkers = 2\n").unwrap();

    let res = cbcc(
        &["run", "--config", config.to_str().unwrap(), "--dataset", &data, "--out", &out_s],
        &[],
    );
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for policy in ["mab", "nsmab", "cmab", "tscc"] {
        let records = fs::read_to_string(out.join(format!("records_toy_{policy}.csv"))).unwrap();
        // Header plus 2 levels x 2 reps x 50 rounds.
        assert_eq!(records.lines().count(), 1 + 200);
        let meta = fs::read_to_string(out.join(format!("meta_toy_{policy}.txt"))).unwrap();
        assert!(meta.contains("dataset_sha256 = "));
        assert!(meta.contains("rounds_per_cell = 50"));
    }

    let res = cbcc(&["summarize", "--in", &out_s], &[]);
    assert!(res.status.success());
    let table = String::from_utf8_lossy(&res.stdout);
    assert!(table.contains("tscc"));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.lines().count() > 4);

    let res = cbcc(&["curves", "--in", &out_s], &[]);
    assert!(res.status.success());
    let curve = fs::read_to_string(out.join("curve_toy_p0.1.csv")).unwrap();
    assert!(curve.lines().count() > 50);
}

#[test]
fn cli_overrides_env_overrides_file() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_dataset(tmp.path());
    let out = tmp.path().join("out");
    let config = tmp.path().join("grid.conf");
    fs::write(&config, "policy = mab\nlevels = 0.5\nreps = 1\nrounds = 10\n").unwrap();
    let res = cbcc(
        &[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--dataset",
            &data,
            "--rounds",
            "7",
            "--out",
            out.to_str().unwrap(),
        ],
        &[("CBCC_ROUNDS", "9"), ("CBCC_REPS", "3")],
    );
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let records = fs::read_to_string(out.join("records_toy_mab.csv")).unwrap();
    // rounds from the CLI (7), reps from the environment (3).
    assert_eq!(records.lines().count(), 1 + 7 * 3);
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_dataset(tmp.path());
    for extra in [
        vec!["--rounds", "0"],
        vec!["--policy", "greedy"],
        vec!["--levels", "1.5"],
        vec!["--reps", "many"],
    ] {
        let mut args = vec!["run", "--dataset", &data, "--out", tmp.path().to_str().unwrap()];
        args.extend(extra.iter().copied());
        let res = cbcc(&args, &[]);
        assert_eq!(res.status.code(), Some(2), "{extra:?}");
    }
    let res = cbcc(&["run", "--out", tmp.path().to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(2), "missing dataset");
}

#[test]
fn data_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "1,2,a\n3,?,b\n").unwrap();
    let out = tmp.path().join("out").display().to_string();
    let res = cbcc(&["run", "--dataset", bad.to_str().unwrap(), "--out", &out], &[]);
    assert_eq!(res.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&res.stderr).contains('?'));

    let missing = tmp.path().join("nope.csv");
    let res = cbcc(&["run", "--dataset", missing.to_str().unwrap(), "--out", &out], &[]);
    assert_eq!(res.status.code(), Some(3));

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let res = cbcc(&["summarize", "--in", empty.to_str().unwrap()], &[]);
    assert_ne!(res.status.code(), Some(0));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_dataset(tmp.path());
    let run = |dir: &str, workers: &str| {
        let out = tmp.path().join(dir);
        let res = cbcc(
            &["run", "--dataset", &data, "--reps", "3", "--workers", workers, "--out", out.to_str().unwrap()],
            &[],
        );
        assert!(res.status.success());
        out
    };
    let a = run("a", "1");
    let b = run("b", "3");
    for policy in ["mab", "nsmab", "cmab", "tscc"] {
        let name = format!("records_toy_{policy}.csv");
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name}");
    }
}
