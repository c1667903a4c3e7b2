use std::process::{Command, Output};

use zeckgame::{zeckendorf, GameRecord, SimStats, SolveReport};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeckgame"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn solve_nine() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("solve.json");
    let text = stdout(&run(&[
        "solve",
        "--n",
        "9",
        "--out",
        path.to_str().unwrap(),
    ]));
    assert!(text.contains("winner player2"), "{text}");
    assert!(text.contains("min 7 "), "{text}");
    let r: SolveReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.min_length, 7);
    assert!(text.contains(&format!("max {}", r.max_length)));
}

#[test]
fn simulate_csv_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("h.csv");
    stdout(&run(&[
        "simulate",
        "--n",
        "200",
        "--trials",
        "9999",
        "--seed",
        "1",
        "--out",
        csv.to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(&csv).unwrap();
    let stats = SimStats::from_csv(&text).unwrap();
    assert!((227.0..=251.0).contains(&stats.mean), "mean {}", stats.mean);
    assert_eq!(stats.trials, 9999);

    let fit_path = dir.path().join("fit.json");
    let out = stdout(&run(&[
        "fit",
        "--in",
        csv.to_str().unwrap(),
        "--out",
        fit_path.to_str().unwrap(),
    ]));
    assert!(out.contains("mu="));
    let fit: zeckgame::GaussianFit =
        serde_json::from_str(&std::fs::read_to_string(&fit_path).unwrap()).unwrap();
    assert_eq!(fit.mu, stats.mean);
}

#[test]
fn identical_args_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    stdout(&run(&[
        "simulate",
        "--n",
        "60",
        "--trials",
        "2000",
        "--seed",
        "4",
        "--out",
        a.to_str().unwrap(),
    ]));
    stdout(&run(&[
        "simulate",
        "--n",
        "60",
        "--trials",
        "2000",
        "--seed",
        "4",
        "--sequential",
        "--out",
        b.to_str().unwrap(),
    ]));
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn simulate_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    stdout(&run(&[
        "simulate",
        "--n",
        "30",
        "--trials",
        "100",
        "--out",
        path.to_str().unwrap(),
    ]));
    let stats: SimStats = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(stats, zeckgame::simulate(30, 100, 0).unwrap());
}

#[test]
fn greedy_play() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("game.json");
    let text = stdout(&run(&[
        "play",
        "--n",
        "500",
        "--policy",
        "greedy",
        "--out",
        path.to_str().unwrap(),
    ]));
    let expected = 500 - zeckendorf(500).unwrap().z();
    assert!(text.contains(&format!("length {expected} ")), "{text}");
    let rec: GameRecord = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rec.replay().unwrap(), zeckendorf(500).unwrap().to_state());

    let csv = dir.path().join("game.csv");
    stdout(&run(&[
        "play",
        "--n",
        "3",
        "--policy",
        "longest",
        "--out",
        csv.to_str().unwrap(),
    ]));
    assert_eq!(
        std::fs::read_to_string(csv).unwrap(),
        "n,policy,length,winner\n3,conjectured_longest,2,player2\n"
    );
}

#[test]
fn bounds_lengths_line() {
    let text = stdout(&run(&["bounds", "--n", "60"]));
    assert!(text.contains("lower 58 ell 9 upper 540"), "{text}");
    let text = stdout(&run(&["lengths", "--n", "4"]));
    assert!(text.contains("min 2 max 3"), "{text}");
    let text = stdout(&run(&["line", "--n", "3"]));
    assert!(text.contains("merge_ones combine(1)"), "{text}");
}

#[test]
fn scaling_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scaling.csv");
    let text = stdout(&run(&[
        "scaling",
        "--ns",
        "20,40,60",
        "--trials",
        "200",
        "--out",
        path.to_str().unwrap(),
    ]));
    assert!(text.contains("slope="));
    let table = std::fs::read_to_string(path).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(table.starts_with("n,mean\n20,"));
}

#[test]
fn tree_dot() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.dot");
    let text = stdout(&run(&["tree", "--n", "4", "--out", path.to_str().unwrap()]));
    assert!(text.contains("nodes 4 edges 4"), "{text}");
    assert!(std::fs::read_to_string(path)
        .unwrap()
        .starts_with("digraph"));
}

#[test]
fn errors_exit_nonzero() {
    for args in [
        &["solve", "--n", "40"][..],
        &["tree", "--n", "30"],
        &["line", "--n", "1"],
        &["solve", "--n", "0"],
        &["play", "--n", "5", "--policy", "minimax"],
        &["solve", "--n", "5", "--bogus"],
        &["simulate", "--n", "5", "--out", "/nonexistent-dir/x.csv"],
    ] {
        let out = run(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["solve", "--n", "40"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit of 25"));
    // raising the limit makes it solvable
    assert!(run(&["solve", "--n", "27", "--limit", "30"])
        .status
        .success());
}
