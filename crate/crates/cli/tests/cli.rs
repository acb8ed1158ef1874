//! End-to-end tests of the `pricer` binary: CSV formats, summary output,
//! exit codes, and byte-level determinism of output files across reruns and
//! thread counts.

use std::path::Path;
use std::process::{Command, Output};

fn pricer() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pricer"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    pricer()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

/// Small-but-valid configuration so tests stay fast.
const FAST: &[&str] = &["--K", "21", "--M", "21", "--nexp", "30", "--refine-iters", "4", "--nsim", "200"];

#[test]
fn solve_emits_expected_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[FAST, &["--out", "table.csv", "solve"]].concat(),
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,v_t0,v_t1,v_t2,v_t3,aB_t0,aB_t1,aB_t2,aC_t0,aC_t1,aC_t2"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 21);

    // first row is s = 0: values all zero
    let first: Vec<f64> = rows[0].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    for t in 1..=4 {
        assert_eq!(first[t], 0.0, "v at s=0 must be 0");
    }

    // last row is s = 1: closed-form price at t = 0 is 2/3
    let last: Vec<f64> = rows[20].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 1.0);
    assert!((last[8] - 2.0 / 3.0).abs() < 1e-12, "aC_t0 at s=1: {}", last[8]);

    // every emitted number is finite
    for row in &rows {
        for v in row.split(',') {
            assert!(v.parse::<f64>().unwrap().is_finite());
        }
    }

    let summary = stdout(&out);
    assert!(summary.contains("v_0_s1 = "));
    assert!(summary.contains("a_cec_0_s1 = 0.6666666666666"));
}

#[test]
fn simulate_emits_paths_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[FAST, &["--out", "sim.csv", "simulate", "cec"]].concat(),
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.path().join("sim.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "path_id,a_t0,a_t1,a_t2,profit");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 200);
    for row in rows {
        let fields: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        // C = 1: profits live in [-1, 1]; prices in [0, 1]
        let profit = fields[4];
        assert!((-1.0..=1.0).contains(&profit));
        for &a in &fields[1..4] {
            assert!((0.0..=1.0).contains(&a));
        }
    }

    let summary = stdout(&out);
    for key in [
        "policy = cec",
        "n = 200",
        "mean_profit = ",
        "q05_profit = ",
        "median_profit = ",
        "q95_profit = ",
        "histogram_bins = 40",
        "hist_0 = ",
        "hist_39 = ",
    ] {
        assert!(summary.contains(key), "summary missing `{key}`:\n{summary}");
    }
}

#[test]
fn bellman_price_spread_widens_over_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            &["--K", "51", "--M", "51", "--nexp", "200", "--nsim", "400"][..],
            &["--out", "sim.csv", "simulate", "bellman"],
        ]
        .concat(),
        dir.path(),
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sim.csv")).unwrap();
    let mut spreads = [0.0f64; 3];
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|row| row.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    for t in 0..3 {
        let prices: Vec<f64> = rows.iter().map(|r| r[1 + t]).collect();
        let mean = prices.iter().sum::<f64>() / prices.len() as f64;
        spreads[t] =
            prices.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / prices.len() as f64;
    }
    // every path starts from the same stock, so the first price is common;
    // dispersion appears as stocks diverge
    assert!(spreads[0] < 1e-24, "t=0 prices should be constant: {}", spreads[0]);
    assert!(spreads[2] > spreads[1]);
}

#[test]
fn compare_same_policy_gives_zero_diffs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[FAST, &["--out", "cmp.csv", "compare", "bellman", "bellman"]].concat(),
        dir.path(),
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("cmp.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "path_id,profit_A,profit_B,diff");
    for row in lines {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[1], fields[2]);
        assert_eq!(fields[3], "0");
    }
    let summary = stdout(&out);
    assert!(summary.contains("frac_a_better = 0"));
    assert!(summary.contains("mean_diff = 0"));
}

#[test]
fn compare_output_is_byte_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (threads, name) in [("1", "a.csv"), ("3", "b.csv"), ("1", "c.csv")] {
        let out = pricer()
            .args([FAST, &["--seed", "7", "--out", name, "compare", "bellman", "cec"]].concat())
            .env("RAYON_NUM_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push((
            std::fs::read(dir.path().join(name)).unwrap(),
            stdout(&out),
        ));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "1-thread vs 3-thread CSV differ");
    assert_eq!(outputs[0].0, outputs[2].0, "rerun CSV differs");
    // summaries match except for the output path line
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with("out = "))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&outputs[0].1), strip(&outputs[1].1));
}

#[test]
fn seed_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    for (seed, name) in [("7", "a.csv"), ("8", "b.csv")] {
        let out = run(
            &[FAST, &["--seed", seed, "--out", name, "compare", "bellman", "cec"]].concat(),
            dir.path(),
        );
        assert!(out.status.success());
    }
    assert_ne!(
        std::fs::read(dir.path().join("a.csv")).unwrap(),
        std::fs::read(dir.path().join("b.csv")).unwrap()
    );
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.toml"),
        "horizon = 2\nunsold_cost = 0.5\nstate_points = 15\nprice_points = 15\nn_exp = 20\nrefine_iters = 2\nn_sim = 50\nseed = 3\n",
    )
    .unwrap();
    let out = run(
        &["--config", "exp.toml", "--out", "t.csv", "solve"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(csv.starts_with("s,v_t0,v_t1,v_t2,aB_t0,aB_t1,aC_t0,aC_t1"));
    assert_eq!(csv.lines().count(), 16);

    // flag overrides config
    let out = run(
        &["--config", "exp.toml", "--T", "1", "--out", "t1.csv", "solve"],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("t1.csv")).unwrap();
    assert!(csv.starts_with("s,v_t0,v_t1,aB_t0,aC_t0"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // validation error: bad parameter value
    let out = run(&["--gamma", "0.9", "solve"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // validation error: unknown config key
    std::fs::write(dir.path().join("bad.toml"), "gama = 0.1\n").unwrap();
    let out = run(&["--config", "bad.toml", "solve"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // usage error: unknown policy name
    let out = run(&["simulate", "greedy"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // runtime error: unwritable output path
    let out = run(
        &[FAST, &["--out", "missing_dir/file.csv", "solve"]].concat(),
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_emits_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            FAST,
            &[
                "--out", "sweep.csv",
                "sweep",
                "--q1-grid", "2.0,2.5",
                "--q2-grid", "3.0:4.0:2",
                "--pairs", "0.5:0.05,1.0:0.1",
                "--policy-b", "cec",
            ],
        ]
        .concat(),
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "C,gamma,q1,q2,relL2,q05,median,q95,fracBetter,error"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8, "2 pairs x 2 q1 x 2 q2");
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 10);
        assert!(fields[9].is_empty(), "unexpected cell error: {}", fields[9]);
        for v in &fields[..9] {
            assert!(v.parse::<f64>().unwrap().is_finite());
        }
    }
    assert!(stdout(&out).contains("failures = 0"));
}

#[test]
fn sweep_rejects_bellman_as_comparison_policy() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[FAST, &["sweep", "--policy-b", "bellman"]].concat(),
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}
