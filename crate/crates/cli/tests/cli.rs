use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn gibbsium(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gibbsium")).args(args).output().unwrap()
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_into(config: &Path, out: &Path, jobs: &str) -> Output {
    gibbsium(&["run", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", jobs])
}

#[test]
fn list_experiments_names_all_eight() {
    let o = gibbsium(&["list-experiments"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in [
        "telescope-check",
        "consistency-check",
        "vp-1d",
        "grising",
        "decimate-dominate",
        "rfim-joint",
        "ad-check",
        "vacuum-check",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from\n{text}");
    }
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let o = gibbsium(&["validate", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", path.display(), stderr(&o));
        seen += 1;
    }
    assert_eq!(seen, 8);
}

#[test]
fn validate_lists_every_violation_with_exit_code_2() {
    let dir = TempDir::new().unwrap();
    let path = write_config(
        &dir,
        "bad.toml",
        "experiment = \"grising\"\njobs = 0\n[grising]\np = [0.2, 1.2]\nbeta = 1.0\n",
    );
    let o = gibbsium(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for field in ["jobs:", "seed:", "grising.p[1]:"] {
        assert!(err.contains(field), "{field} missing from\n{err}");
    }
}

#[test]
fn unknown_keys_are_config_errors() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "typo.toml", "experiment = \"vp-1d\"\n[vp-1d]\nbeta_muu = 0.3\n");
    let o = gibbsium(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("beta_muu"));
}

#[test]
fn enumeration_cap_is_a_numeric_error_with_exit_code_3() {
    let dir = TempDir::new().unwrap();
    let path = write_config(
        &dir,
        "big.toml",
        "experiment = \"decimate-dominate\"\n[decimate-dominate]\ndim = 2\nn = [12]\nwindow = 0\n",
    );
    let o = run_into(&path, &dir.path().join("out"), "1");
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn missing_files_and_unwritable_outputs_exit_with_code_4() {
    let dir = TempDir::new().unwrap();
    let o = gibbsium(&["validate", dir.path().join("absent.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let path = write_config(&dir, "vp.toml", "experiment = \"vp-1d\"\n[vp-1d]\nn = [1]\n");
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = run_into(&path, &blocker, "1");
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn csv_starts_with_metadata_and_reports_the_zero_rate() {
    let dir = TempDir::new().unwrap();
    let path = write_config(
        &dir,
        "g.toml",
        "experiment = \"grising\"\nseed = 4\n[grising]\np = [0.5]\nsamples = 500\n",
    );
    let out = dir.path().join("out");
    let o = run_into(&path, &out, "2");
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("grising.csv")).unwrap();
    let mut lines = text.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# gibbsium experiment=grising config_sha256="), "{meta}");
    assert!(meta.ends_with(" seed=4"));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let exact: f64 = row[header.iter().position(|&c| c == "exact").unwrap()].parse().unwrap();
    assert!((exact - 0.5f64.ln()).abs() <= 1e-12);
}

#[test]
fn reruns_and_worker_counts_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let path = write_config(
        &dir,
        "t.toml",
        "experiment = \"telescope-check\"\nseed = 21\n[telescope-check]\ninstances = 30\n",
    );
    let outputs: Vec<Vec<u8>> = [("a", "1"), ("b", "1"), ("c", "4")]
        .iter()
        .map(|(sub, jobs)| {
            let out = dir.path().join(sub);
            assert!(run_into(&path, &out, jobs).status.success());
            fs::read(out.join("telescope-check.csv")).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn seed_override_changes_the_hash() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "v.toml", "experiment = \"vacuum-check\"\nseed = 1\n[vacuum-check]\ninstances = 3\n");
    let first = run_into(&path, &dir.path().join("a"), "1");
    let second = gibbsium(&[
        "run",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("b").to_str().unwrap(),
        "--seed",
        "2",
    ]);
    let meta = |o: &Output| String::from_utf8_lossy(&o.stdout).trim().to_string();
    assert!(first.status.success() && second.status.success());
    assert_ne!(meta(&first), meta(&second));
    let csv = fs::read_to_string(dir.path().join("b/vacuum-check.csv")).unwrap();
    assert!(csv.lines().next().unwrap().ends_with("seed=2"));
}
