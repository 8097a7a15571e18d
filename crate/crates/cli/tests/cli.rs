use std::path::Path;
use std::process::{Command, Output};

const MARKOV: &str = r#"{"degree":{"family":"regular","d":4},"infectious_period":{"family":"exponential","rate":1.0},"beta":1.0}"#;
const VIOLATING: &str = r#"{"degree":{"family":"regular","d":4},"infectious_period":{"family":"exponential","rate":1.0},"beta":3.0}"#;

fn epinet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epinet"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn run_in(dir: &Path, sub: &str, config: &str, extra: &[&str]) -> Output {
    let out = dir.join("out");
    let mut args = vec![sub, "--config", config, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    epinet(&args)
}

#[test]
fn analyze_accepts_bare_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "p.json", MARKOV);
    let out = run_in(dir.path(), "analyze", &config, &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let line: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let d = line["summary"]["duration_constant"].as_f64().unwrap();
    assert!((d - 2.1708203932).abs() < 1e-8);
    for name in ["results.csv", "summary.json", "manifest.json"] {
        assert!(dir.path().join("out").join(name).exists(), "{name}");
    }
}

#[test]
fn montecarlo_output_is_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "mc.json",
        &format!(r#"{{"parameters":{MARKOV},"n":[600,1200],"major_outbreaks":10,"base_seed":5}}"#),
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out, jobs) in [(&a, "1"), (&b, "2")] {
        let status = epinet(&[
            "montecarlo",
            "--config",
            &config,
            "--out",
            out.to_str().unwrap(),
            "--jobs",
            jobs,
        ]);
        assert_eq!(status.status.code(), Some(0));
    }
    let read = |d: &Path| std::fs::read(d.join("results.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["kind"], "montecarlo");
    assert_eq!(manifest["partial"], false);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "sim.json",
        &format!(r#"{{"parameters":{MARKOV},"n":[500],"base_seed":1}}"#),
    );
    let first = run_in(dir.path(), "simulate", &config, &["--seed", "9"]);
    let second = run_in(dir.path(), "simulate", &config, &["--seed", "9"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let outcome: serde_json::Value = serde_json::from_str(
        String::from_utf8_lossy(&first.stdout)
            .lines()
            .next()
            .unwrap(),
    )
    .unwrap();
    assert_eq!(outcome["outcome"]["seed"], 9);
}

#[test]
fn refused_scaling_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "scaling.json",
        &format!(r#"{{"parameters":{VIOLATING},"n":[1000,2000],"target":"strong"}}"#),
    );
    let out = run_in(dir.path(), "scaling", &config, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("if and only if"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = run_in(dir.path(), "analyze", missing.to_str().unwrap(), &[]);
    assert_eq!(out.status.code(), Some(1));

    let typo = write(
        dir.path(),
        "typo.json",
        &format!(r#"{{"parameters":{MARKOV},"nn":[10]}}"#),
    );
    assert_eq!(
        run_in(dir.path(), "montecarlo", &typo, &[]).status.code(),
        Some(1)
    );

    let wrong_kind = write(
        dir.path(),
        "kind.json",
        &format!(r#"{{"kind":"scaling","parameters":{MARKOV}}}"#),
    );
    assert_eq!(
        run_in(dir.path(), "analyze", &wrong_kind, &[])
            .status
            .code(),
        Some(1)
    );

    let no_out = write(dir.path(), "p.json", MARKOV);
    assert_eq!(
        epinet(&["analyze", "--config", &no_out]).status.code(),
        Some(1)
    );
}

#[test]
fn examples_run_without_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("ex");
    let out = epinet(&["examples", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let line: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(line["summary"]["failures"], 0);
    for name in [
        "results.csv",
        "example1.csv",
        "example2.csv",
        "example3.csv",
    ] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
}
