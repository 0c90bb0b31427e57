//! End-to-end runs of the binary: exit codes, output files, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn covsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn help_exits_zero_and_names_all_subcommands() {
    let out = covsim(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    for sub in [
        "simulate",
        "replicate-case2",
        "fit",
        "oracle-2d",
        "verify-beta",
        "verify-ci",
    ] {
        assert!(text.contains(sub), "--help lacks {sub}:\n{text}");
    }

    let sub_help = covsim(&["simulate", "--help"]);
    assert_eq!(sub_help.status.code(), Some(0));
    let sub_text = stdout_of(&sub_help);
    for flag in [
        "--experiment",
        "--n-grid",
        "--a",
        "--rho-n",
        "--s-n",
        "--r-2n",
        "--reps",
        "--seed",
        "--workers",
        "--out",
        "--config",
        "--stride",
    ] {
        assert!(sub_text.contains(flag), "simulate --help lacks {flag}");
    }
}

#[test]
fn unknown_flags_and_bad_values_exit_one() {
    assert_eq!(covsim(&["simulate", "--bogus"]).status.code(), Some(1));
    assert_eq!(covsim(&["no-such-subcommand"]).status.code(), Some(1));

    let missing_seed = covsim(&["simulate", "--experiment", "anchors_1d", "--a", "1"]);
    assert_eq!(missing_seed.status.code(), Some(1));

    let bad_experiment = covsim(&[
        "simulate",
        "--experiment",
        "nonsense",
        "--a",
        "1",
        "--reps",
        "2",
        "--seed",
        "1",
        "--out",
        "x.csv",
    ]);
    assert_eq!(bad_experiment.status.code(), Some(1));
    assert!(stderr_of(&bad_experiment).contains("anchors_1d"));
}

#[test]
fn simulate_writes_both_csv_files_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("run1.csv");
    let out2 = dir.path().join("run2.csv");

    let base = [
        "simulate",
        "--experiment",
        "cv1_1d",
        "--n-grid",
        "50,100",
        "--a",
        "1.5",
        "--reps",
        "40",
        "--seed",
        "42",
    ];
    let run = |path: &Path, extra: &[&str]| {
        let mut args: Vec<&str> = base.to_vec();
        args.push("--out");
        let p = path.to_str().unwrap();
        args.push(p);
        args.extend_from_slice(extra);
        covsim(&args)
    };

    let first = run(&out1, &["--workers", "1"]);
    assert_eq!(first.status.code(), Some(0), "stderr: {}", stderr_of(&first));
    let text = stdout_of(&first);
    assert!(text.contains("cv1_1d"));
    assert!(text.contains("chacha8"), "summary names the generator");

    let second = run(&out2, &["--workers", "4"]);
    assert_eq!(second.status.code(), Some(0));

    // same seed, different worker counts: byte-identical artifacts
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    assert_eq!(b1, b2);
    assert_eq!(
        std::fs::read(out1.with_extension("agg.csv")).unwrap(),
        std::fs::read(out2.with_extension("agg.csv")).unwrap()
    );

    let header = String::from_utf8_lossy(&b1).lines().next().unwrap().to_string();
    assert_eq!(
        header,
        "experiment,n,a,trial,seed_stream,cost,cost_phasewise,ci_verified,deactivated_count"
    );
}

#[test]
fn config_file_drives_a_run_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    let out_path = dir.path().join("from_config.csv");
    std::fs::write(
        &cfg_path,
        format!(
            r#"
experiment = "anchors_1d"
n_grid = [25]
a = 2.0
reps = 10
master_seed = 7
output = "{}"
"#,
            out_path.display()
        ),
    )
    .unwrap();

    let out = covsim(&["simulate", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert!(out_path.exists());

    // --reps overrides the config value
    let out_path2 = dir.path().join("override.csv");
    let out = covsim(&[
        "simulate",
        "--config",
        cfg_path.to_str().unwrap(),
        "--reps",
        "3",
        "--out",
        out_path2.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let trials = std::fs::read_to_string(&out_path2).unwrap();
    assert_eq!(trials.lines().count(), 1 + 3, "header plus three trials");
}

#[test]
fn fit_reports_the_planted_slope() {
    let dir = tempfile::tempdir().unwrap();
    let agg = dir.path().join("table.agg.csv");
    // exact power law mean = 8/n → slope −1
    let mut text = String::from("n,a,reps,mean,std_err,centerline\n");
    for n in [100u64, 200, 400, 800, 1600] {
        text.push_str(&format!("{n},1.0,5,{},0.0,\n", 8.0 / n as f64));
    }
    std::fs::write(&agg, text).unwrap();

    let out = covsim(&["fit", "--in", agg.to_str().unwrap(), "--n-min", "100"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let line = stdout_of(&out);
    assert!(line.contains("slope -1.0000"), "got: {line}");
    assert!(line.contains("R² 1.0000"), "got: {line}");
}

#[test]
fn verify_beta_single_check_and_unknown_check() {
    let out = covsim(&["verify-beta", "--check", "lemma_first", "--n-max", "2000"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).contains("lemma_first: ok"));

    let bad = covsim(&["verify-beta", "--check", "nonsense"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn verify_ci_runs_clean_and_rejects_uncheckable_experiments() {
    let out = covsim(&[
        "verify-ci",
        "--experiment",
        "cv1_1d",
        "--n",
        "100",
        "--a",
        "1",
        "--reps",
        "50",
        "--seed",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).contains("zero violations"));

    let bad = covsim(&[
        "verify-ci",
        "--experiment",
        "mv_1d",
        "--n",
        "100",
        "--a",
        "1",
        "--reps",
        "5",
        "--seed",
        "9",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn oracle_2d_prints_normalized_table() {
    let out = covsim(&[
        "oracle-2d",
        "--a",
        "1",
        "--q-grid",
        "2,3",
        "--reps",
        "2",
        "--seed",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("mean/centerline"));
    assert!(text.contains("\n       4  ") && text.contains("\n       9  "));
}

#[test]
fn replicate_case2_writes_batched_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("case2.csv");
    let out = covsim(&[
        "replicate-case2",
        "--a",
        "2",
        "--seed",
        "11",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let agg = std::fs::read_to_string(out_path.with_extension("agg.csv")).unwrap();
    // 60 sizes × 20 batches, plus the header
    assert_eq!(agg.lines().count(), 1 + 60 * 20);
    let trials = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(trials.lines().count(), 1 + 60 * 200);
}
