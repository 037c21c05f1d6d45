use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclic-aoi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn analyze_round_robin_default_scenario() {
    let o = run(&["analyze", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("weighted   2.000000000000"), "{text}");
}

#[test]
fn analyze_accepts_tuple_form() {
    let a = stdout(&run(&["analyze", "1221", "--preset", "fig4a"]));
    let b = stdout(&run(&["analyze", "(4, 2, {2,0})", "--preset", "fig4a"]));
    assert_eq!(a.lines().nth(1), b.lines().nth(1));
}

#[test]
fn optimize_reports_both_searches() {
    let o = run(&["optimize", "--preset", "fig5", "--alpha", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("optimal") && text.contains("insertion") && text.contains("a range"));
}

#[test]
fn simulate_schedule_and_pgaw() {
    let o = run(&["simulate", "1222", "--cycles", "20000", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("analytic"));
    let o = run(&["simulate", "--pgaw", "0.4", "--cycles", "20000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("analytic"));
}

#[test]
fn sweep_writes_sorted_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(
        &cfg,
        r#"
[scenario]
mean_service_1 = 1.0
drop_prob_1 = 0.0
weight_1 = 0.5
mean_service_2 = 1.0
drop_prob_2 = 0.9

[sweep]
varying = "drop_prob_1"
grid = [0.2, 0.5]
methods = ["round_robin", "optimal"]
alpha = 20
"#,
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = fs::read_to_string(&out).unwrap();
    let keys: Vec<(&str, &str)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(',');
            (f.next().unwrap(), f.next().unwrap())
        })
        .collect();
    assert_eq!(csv.lines().next(), Some("param,method,analytic_aoi"));
    assert_eq!(
        keys,
        [
            ("0.2", "optimal"),
            ("0.2", "round_robin"),
            ("0.5", "optimal"),
            ("0.5", "round_robin")
        ]
    );
}

#[test]
fn sweep_preset_with_overrides_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2)
        .map(|k| dir.path().join(format!("{k}.csv")))
        .collect();
    for p in &paths {
        let o = run(&[
            "sweep",
            "--preset",
            "fig6",
            "--cycles",
            "4000",
            "--seed",
            "9",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let a = fs::read_to_string(&paths[0]).unwrap();
    assert_eq!(a, fs::read_to_string(&paths[1]).unwrap());
    assert!(a.starts_with("param,method,analytic_aoi,sim_mean,sim_stderr\n"));
    assert_eq!(a.lines().count(), 1 + 9 * 4);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["bogus"][..],
        &["analyze"],
        &["sweep", "--preset", "fig9"],
        &["validate", "--scale", "huge"],
        &["optimize", "--alpha", "many"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn invalid_input_exits_1() {
    assert_eq!(run(&["analyze", "111"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--pgaw", "1.5"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[scenario]\nmean_service_1 = -1.0\n").unwrap();
    assert_eq!(
        run(&["analyze", "12", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["sweep", "--config", "/nonexistent.toml"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn validate_quick_passes() {
    let o = run(&["validate", "--scale", "quick"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
}
