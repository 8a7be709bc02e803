use std::process::Command as Process;

use bangbang_pg::cli::{
    main_dispatch, parse_config, parse_config_with_env, parse_levels, CliError, Command, RunConfig, DEFAULT_OUT,
    EXIT_CONFIG, EXIT_IO, EXIT_SOLVER,
};

fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
    let mut v = vec!["bangbang-pg"];
    v.extend_from_slice(args);
    parse_config_with_env(v, None)
}

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_bangbang-pg"))
}

#[test]
fn study_defaults_follow_coupling() {
    let c = parse(&["study", "--levels", "1..4"]).unwrap();
    assert_eq!(c.command, Command::Study);
    assert_eq!(c.levels, vec![1, 2, 3, 4]);
    assert_eq!(c.alpha, None);
    assert_eq!(c.t0, 1e-5);
    assert_eq!(c.max_iter, 500);
    assert_eq!(c.out.to_str(), Some(DEFAULT_OUT));
    assert!(!c.parallel_levels);
    let all = parse(&["study"]).unwrap();
    assert_eq!(all.levels, (1..=6).collect::<Vec<_>>());
}

#[test]
fn level_ranges() {
    assert_eq!(parse_levels("2..=3").unwrap(), vec![2, 3]);
    assert_eq!(parse_levels("5").unwrap(), vec![5]);
    assert!(parse_levels("4..2").is_err());
    assert!(parse_levels("a..b").is_err());
    assert_eq!(parse(&["study", "--levels", "1..13"]).unwrap_err().exit_code(), EXIT_CONFIG);
}

#[test]
fn usage_errors() {
    let no_args: Vec<&str> = vec!["bangbang-pg"];
    let e = parse_config_with_env(no_args, None).unwrap_err();
    assert!(matches!(e, CliError::Usage(_)));
    assert_eq!(e.exit_code(), EXIT_CONFIG);

    let e = parse(&["solve", "--level", "3", "--alpha", "0"]).unwrap_err();
    assert_eq!(e.exit_code(), EXIT_CONFIG);
    assert!(e.to_string().contains("alpha must be positive"));
    assert!(parse(&["solve", "--level", "3", "--alpha", "-1"]).is_err());
    assert!(parse(&["solve", "--level", "2", "--bogus"]).is_err());
    assert!(parse(&["solve"]).is_err());
    assert!(parse(&["solve", "--levels", "1..2"]).is_err());
    assert!(parse(&["study", "--analytic"]).is_err());
    assert!(matches!(parse(&["--help"]), Err(CliError::Info(_))));
}

#[test]
fn precedence_flags_over_file_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"levels": "2..3", "t0": 1e-7, "max_iter": 40, "out": "from-file"}"#).unwrap();
    let p = path.to_str().unwrap();

    let c = parse(&["study", "--config", p, "--t0", "1e-6"]).unwrap();
    assert_eq!(c.levels, vec![2, 3]);
    assert_eq!(c.t0, 1e-6);
    assert_eq!(c.max_iter, 40);
    assert_eq!(c.out.to_str(), Some("from-file"));

    let list = dir.path().join("list.json");
    std::fs::write(&list, r#"{"levels": [4, 2]}"#).unwrap();
    assert_eq!(parse(&["study", "--config", list.to_str().unwrap()]).unwrap().levels, vec![2, 4]);

    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"level": 2, "tolerance": 1}"#).unwrap();
    let e = parse(&["solve", "--config", unknown.to_str().unwrap()]).unwrap_err();
    assert_eq!(e.exit_code(), EXIT_CONFIG);

    let malformed = dir.path().join("bad.json");
    std::fs::write(&malformed, "{level: 2").unwrap();
    assert_eq!(parse(&["solve", "--config", malformed.to_str().unwrap()]).unwrap_err().exit_code(), EXIT_CONFIG);

    let missing = dir.path().join("missing.json");
    assert_eq!(parse(&["solve", "--config", missing.to_str().unwrap()]).unwrap_err().exit_code(), EXIT_IO);
}

#[test]
fn output_directory_falls_back_to_environment() {
    let args = ["bangbang-pg", "solve", "--level", "2"];
    let c = parse_config_with_env(args, Some("env-dir".into())).unwrap();
    assert_eq!(c.out.to_str(), Some("env-dir"));
    let c = parse_config_with_env(["bangbang-pg", "solve", "--level", "2", "--out", "flag-dir"], Some("env-dir".into())).unwrap();
    assert_eq!(c.out.to_str(), Some("flag-dir"));
    // the real environment is consulted by `parse_config`
    assert!(parse_config(args).is_ok());
}

#[test]
fn solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let c = parse(&["solve", "--level", "2", "--out", out.to_str().unwrap()]).unwrap();
        main_dispatch(&c).unwrap();
        (
            std::fs::read(out.join("trajectory.csv")).unwrap(),
            std::fs::read(out.join("summary.json")).unwrap(),
            out,
        )
    };
    let (a, sa, out) = run("a");
    let (b, sb, _) = run("b");
    assert_eq!(a, b);
    assert_eq!(sa, sb);
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["grids"][0]["time_steps"], 16);
    assert_eq!(meta["grids"][0]["nodes"], 25);
    assert_eq!(meta["pcg_relative_tolerance"], 1e-12);
    assert!(meta["time_step_rule"].as_str().unwrap().contains("round"));
    assert!(meta["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn study_writes_tables_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let c = parse(&["study", "--levels", "1..3", "--parallel-levels", "--out", dir.path().to_str().unwrap()]).unwrap();
    main_dispatch(&c).unwrap();
    let table = bangbang_pg::benchmark::read_table(&dir.path().join("eoc_table.csv")).unwrap();
    assert_eq!(table.rows.iter().map(|r| r.level).collect::<Vec<_>>(), vec![1, 2, 3]);
    assert_eq!(table.rows[2].steps, 45);
    for f in ["eoc_table.md", "trajectory_level1.csv", "trajectory_level3.csv", "metadata.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn analytic_kappa_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let c = parse(&["diagnose-kappa", "--analytic", "--out", dir.path().to_str().unwrap()]).unwrap();
    main_dispatch(&c).unwrap();
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("metadata.json")).unwrap()).unwrap();
    let k = meta["kappa_hat"].as_f64().unwrap();
    assert!((k - 1.0).abs() < 0.15, "{k}");
    let csv = std::fs::read_to_string(dir.path().join("kappa.csv")).unwrap();
    assert_eq!(csv.lines().count(), 8);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let s = bin().output().unwrap();
    assert_eq!(s.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&s.stderr).contains("Usage"));

    let s = bin().args(["solve", "--level", "3", "--alpha", "0", "--out", out]).output().unwrap();
    assert_eq!(s.status.code(), Some(EXIT_CONFIG));

    let s = bin().args(["solve", "--level", "3", "--max-iter", "1", "--out", out]).output().unwrap();
    assert_eq!(s.status.code(), Some(EXIT_SOLVER));

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let s = bin().args(["solve", "--level", "1", "--out", blocker.join("sub").to_str().unwrap()]).output().unwrap();
    assert_eq!(s.status.code(), Some(EXIT_IO));

    let s = bin().args(["solve", "--level", "1", "--out", out]).env("BANGBANG_PG_OUT", "/nonexistent").output().unwrap();
    assert_eq!(s.status.code(), Some(0));
    assert!(dir.path().join("trajectory.csv").exists());

    let s = bin().arg("--help").output().unwrap();
    assert_eq!(s.status.code(), Some(0));
}
