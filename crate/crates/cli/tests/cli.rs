//! Dispatch-level tests for the command-line interface: exit codes,
//! configuration echo, file outputs and rerun determinism.

use std::fs;
use std::path::Path;

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["stabfar".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    stabfar_cli::dispatch(argv)
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]), 0);
}

#[test]
fn unknown_subcommand_exits_two() {
    assert_eq!(run(&["frobnicate"]), 2);
}

#[test]
fn missing_dim_exits_two() {
    assert_eq!(run(&["states", "catalog"]), 2);
}

#[test]
fn bad_dimension_exits_two() {
    assert_eq!(run(&["analysis", "table1", "--dim", "6"]), 2);
}

#[test]
fn bad_kind_exits_two() {
    assert_eq!(run(&["analysis", "table1", "--dim", "3", "--kind", "weird"]), 2);
}

#[test]
fn table1_d2_passes() {
    assert_eq!(run(&["analysis", "table1", "--dim", "2"]), 0);
}

#[test]
fn classify_d4_runs() {
    assert_eq!(run(&["analysis", "classify-d4"]), 0);
}

#[test]
fn mub_dump_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mub.json");
    assert_eq!(run(&["mub", "dump", "--dim", "3", "--out", out.to_str().unwrap()]), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["dim"], 3);
    assert_eq!(doc["bases"].as_array().unwrap().len(), 4);
}

#[test]
fn mub_dump_flower_out_of_range_exits_two() {
    assert_eq!(run(&["mub", "dump", "--dim", "3", "--flower", "9"]), 2);
}

#[test]
fn potentials_eval_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    fs::write(&state, "[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]").unwrap();
    let out = dir.path().join("report.json");
    assert_eq!(
        run(&[
            "potentials",
            "eval",
            "--state",
            state.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    // A stabilizer state at d=3 sits at (1/3, 3/2).
    let f_sic = doc["report"]["f_sic"].as_f64().unwrap();
    assert!((f_sic - 1.5).abs() < 1e-12);
}

#[test]
fn potentials_eval_dim_mismatch_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    fs::write(&state, "[[1.0, 0.0], [0.0, 0.0]]").unwrap();
    assert_eq!(
        run(&["potentials", "eval", "--dim", "5", "--state", state.to_str().unwrap()]),
        2
    );
}

#[test]
fn scatter_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        assert_eq!(
            run(&[
                "explore",
                "scatter",
                "--dim",
                "2",
                "--n",
                "200",
                "--seed",
                "7",
                "--out",
                out.to_str().unwrap()
            ]),
            0
        );
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let text = fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("f_mus,f_sic,anchor\n"));
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn scatter_unknown_anchor_exits_two() {
    assert_eq!(
        run(&["explore", "scatter", "--dim", "2", "--n", "10", "--mix", "wat:10"]),
        2
    );
}

#[test]
fn spec_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sc.csv");
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        format!(r#"{{"dim": 2, "seed": 9, "out": {:?}}}"#, out.to_str().unwrap()),
    )
    .unwrap();
    // --dim 3 on the command line loses to the spec file.
    assert_eq!(
        run(&[
            "explore",
            "scatter",
            "--dim",
            "3",
            "--n",
            "50",
            "--spec",
            spec.to_str().unwrap()
        ]),
        0
    );
    assert!(out.exists());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn optimize_runs_problem_file() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("problem.json");
    fs::write(
        &problem,
        r#"{"dim": 2, "objective": "f_sic", "restarts": 20}"#,
    )
    .unwrap();
    let out = dir.path().join("result.json");
    assert_eq!(
        run(&[
            "explore",
            "optimize",
            "--problem",
            problem.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    // Minimizing f_SIC at d=2 finds a SIC fiducial.
    assert!(doc["value"].as_f64().unwrap() < 1e-12);
    assert_eq!(doc["converged"], true);
}

#[test]
fn optimize_bad_objective_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("problem.json");
    fs::write(&problem, r#"{"dim": 2, "objective": "nonsense"}"#).unwrap();
    assert_eq!(run(&["explore", "optimize", "--problem", problem.to_str().unwrap()]), 2);
}

#[test]
fn fs_average_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("avg.json");
    assert_eq!(
        run(&[
            "explore",
            "fs-average",
            "--dim",
            "2",
            "--n",
            "20000",
            "--functional",
            "fsic",
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["within_three_stderr"], true);
}

#[test]
fn graph_reads_states_csv() {
    let dir = tempfile::tempdir().unwrap();
    let states = dir.path().join("states.csv");
    // Two orthogonal states and a copy of the first.
    fs::write(
        &states,
        "re0,im0,re1,im1\n1.0,0.0,0.0,0.0\n0.0,0.0,1.0,0.0\n1.0,0.0,0.0,0.0\n",
    )
    .unwrap();
    let out = dir.path().join("graph.json");
    assert_eq!(
        run(&[
            "analysis",
            "graph",
            "--in",
            states.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["order"], 2);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 1);
    assert_eq!(doc["regular"], true);
}

#[test]
fn reproduce_requires_figure_or_table() {
    assert_eq!(run(&["reproduce"]), 2);
    assert_eq!(run(&["reproduce", "--figure", "9"]), 2);
}

#[test]
fn reproduce_figure_five_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&["reproduce", "--figure", "5", "--out", dir.path().to_str().unwrap()]),
        0
    );
    assert!(dir.path().join("classify_d4.json").exists());
}

#[test]
fn reproduce_table_one_single_dim_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&[
            "reproduce",
            "--table",
            "1",
            "--dim",
            "2",
            "--out",
            dir.path().to_str().unwrap()
        ]),
        0
    );
    assert!(dir.path().join("table1.json").exists());
}

#[test]
fn atomic_writes_leave_no_temp_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sc.csv");
    assert_eq!(
        run(&["explore", "scatter", "--dim", "2", "--n", "50", "--out", out.to_str().unwrap()]),
        0
    );
    let leftovers: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|n| n != Path::new("sc.csv"))
        .collect();
    assert!(leftovers.is_empty(), "unexpected files: {leftovers:?}");
}
