use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relsteinberg"))
}

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const JOB: &str = r#"
[ring]
modulus = 8
size = 4
crossed = { kind = "ideal", generators = [[2]] }

[roots]
system = "A3"

[job]
samples = 4
seed = 42
"#;

#[test]
fn empty_suite_exits_zero_with_empty_report() {
    let out = bin().args(["--suite", "none"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suites"].as_array().unwrap().len(), 0);
    assert_eq!(v["pass"], true);
}

#[test]
fn report_is_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "job.toml", JOB);
    let run = |jobs: &str, out: &str| {
        let o = dir.path().join(out);
        let st = bin()
            .args(["--config", cfg.to_str().unwrap(), "--suite", "relations,ft", "--jobs", jobs, "--out", o.to_str().unwrap()])
            .status()
            .unwrap();
        assert_eq!(st.code(), Some(0));
        std::fs::read(o).unwrap()
    };
    let a = run("1", "a.json");
    let b = run("3", "b.json");
    let c = run("3", "c.json");
    assert_eq!(a, b);
    assert_eq!(b, c);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["seed"], 42);
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "job.toml", JOB);
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "--suite", "chevalley", "--relations", "St1,HW", "--samples", "2", "--seed", "9"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 9);
    let names: Vec<&str> = v["suites"][0]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"chevalley:A3:HW"));
    assert!(!names.iter().any(|n| n.ends_with(":Conj1")));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[ring]\nmodulus = \"eight\"\n");
    assert_eq!(bin().args(["--config", bad.to_str().unwrap()]).status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["--suite", "bogus"]).status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["--config", "/nonexistent/job.toml"]).status().unwrap().code(), Some(2));
    // a family that is not a complete set of full idempotents is a context error
    let fam = write(dir.path(), "fam.toml", &JOB.replace("size = 4", "size = 4\nfamily = [[0, 1], [2, 3]]"));
    assert_eq!(bin().args(["--config", fam.to_str().unwrap(), "--suite", "relations"]).status().unwrap().code(), Some(2));
}

#[test]
fn generator_cap_overflow_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "job.toml", &JOB.replace("seed = 42", "seed = 42\ngenerator_cap = 1"));
    // an over-cap presentation is a context error, not a verification failure
    assert_eq!(bin().args(["--config", cfg.to_str().unwrap(), "--suite", "ft"]).status().unwrap().code(), Some(2));
}

#[test]
fn shipped_config_runs_clean() {
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/mat4_z8.toml");
    let out = bin().args(["--config", cfg, "--samples", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suites"].as_array().unwrap().len(), 4);
}
