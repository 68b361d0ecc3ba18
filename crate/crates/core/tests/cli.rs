//! End-to-end runs of the `fracml` binary.

use std::path::Path;
use std::process::{Command, Output};

fn fracml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracml")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows (everything after the column header), split on `delim`.
fn rows(text: &str, delim: char) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(delim).map(str::to_string).collect())
        .collect()
}

fn meta<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix("## ")?.strip_prefix(key)?.strip_prefix(": "))
}

#[test]
fn ml_eval_single_row() {
    let o = fracml(&["ml-eval", "--alpha", "0.5", "--z", "0"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o), ',');
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][1].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn necessary_condition_exit_code() {
    let o = fracml(&["solve", "--alpha", "0.5", "--lambda", "-1", "--f", "const:-1", "--u0", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda*u0 + f(0) = 0"));
    assert!(o.stdout.is_empty());
}

#[test]
fn formal_solution_is_allowed_on_request() {
    let o = fracml(&["solve", "--alpha", "0.5", "--lambda", "-1", "--f", "const:-1", "--u0", "0", "--formal"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(meta(&text, "existence_residual").unwrap().parse::<f64>().unwrap(), -1.0);
}

#[test]
fn invalid_configuration_exit_code() {
    for args in [
        &["deriv", "--alpha", "0", "--f", "const:1"][..],
        &["deriv", "--alpha", "0.5", "--f", "nonsense:1"],
        &["deriv", "--alpha", "0.5", "--f", "const:1", "--n", "1"],
        &["deriv", "--alpha", "0.5", "--f", "const:1", "--a", "1", "--b", "0"],
        &["examples", "--id", "9", "--alpha", "0.5"],
        &["certify", "--check", "nope", "--alpha", "0.5"],
        &["no-such-command"],
    ] {
        let o = fracml(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn negative_denominator_needs_flag() {
    // B − λ(1 − α) = 1 − 10·0.5 < 0
    let base = ["solve", "--alpha", "0.5", "--lambda", "10", "--u0", "0", "--f", "const:0"];
    assert_eq!(fracml(&base).status.code(), Some(3));
    let mut with_flag = base.to_vec();
    with_flag.push("--allow-negative-denominator");
    assert!(fracml(&with_flag).status.success());
}

#[test]
fn example_three_within_bound() {
    let o = fracml(&["examples", "--id", "3", "--alpha", "0.5", "--n", "512"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let r = rows(&text, ',');
    assert_eq!(r.len(), 513);
    for row in &r {
        let t: f64 = row[0].parse().unwrap();
        let v: f64 = row[1].parse().unwrap();
        let bound: f64 = row[2].parse().unwrap();
        assert!((bound - (1.0 - (-t).exp())).abs() < 1e-15);
        assert!(v.abs() <= bound + 1e-4);
        assert_eq!(row[4], "holds");
    }
    assert_eq!(meta(&text, "bound_verdict"), Some("holds"));
}

#[test]
fn runs_are_deterministic() {
    let args = ["certify", "--check", "comparison-sweep", "--alpha", "0.5", "--count", "10", "--seed", "7"];
    assert_eq!(fracml(&args).stdout, fracml(&args).stdout);
    let args = ["certify", "--check", "extremum-sweep", "--alpha", "0.25", "--count", "20"];
    let a = fracml(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, fracml(&args).stdout);
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = fracml(&["deriv", "--alpha", "0.3", "--f", "exp-decay:2", "--f", "poly:0,1", "--n", "32", "--b", "2"]);
    assert!(first.status.success());
    let text = stdout(&first);
    let toml: String = text
        .lines()
        .skip(1)
        .take_while(|l| !l.starts_with("##"))
        .filter_map(|l| l.strip_prefix("# "))
        .map(|l| format!("{l}\n"))
        .collect();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, toml).unwrap();
    let again = fracml(&["deriv", "--config", cfg.to_str().unwrap()]);
    assert!(again.status.success(), "{}", String::from_utf8_lossy(&again.stderr));
    assert_eq!(stdout(&again), text);

    // command-line values override the file
    let over = fracml(&["deriv", "--config", cfg.to_str().unwrap(), "--alpha", "0.6"]);
    assert!(stdout(&over).contains("alpha = 0.6"));

    // a file written for another command is rejected
    let wrong = fracml(&["integral", "--config", cfg.to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn output_file_and_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.tsv");
    let o = fracml(&[
        "integral", "--kind", "rl", "--alpha", "0.5", "--f", "const:1", "--n", "8", "--format", "tsv", "--output",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let r = rows(&text, '\t');
    let last: f64 = r.last().unwrap()[1].parse().unwrap();
    assert!((last - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-12);
}

#[test]
fn tabulated_forcing_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let mut data = String::from("# t, f, f'\n");
    for i in 0..=200 {
        let t = i as f64 / 100.0;
        data.push_str(&format!("{t},{},{}\n", -1.0, 0.0));
    }
    std::fs::write(&path, data).unwrap();
    let spec = format!("file:{}", path.display());
    let o = fracml(&["solve", "--alpha", "0.5", "--lambda", "-1", "--u0", "-1", "--f", &spec, "--b", "2", "--n", "64"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for row in rows(&stdout(&o), ',') {
        assert!((row[1].parse::<f64>().unwrap() + 1.0).abs() < 1e-12);
    }
}

#[test]
fn shifted_interval_solve() {
    // u ≡ −1 solves the comparator on any interval
    let o = fracml(&["solve", "--alpha", "0.5", "--lambda", "-1", "--u0", "-1", "--f", "const:-1", "--a", "3", "--b", "4"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o), ',');
    assert_eq!(r[0][0].parse::<f64>().unwrap(), 3.0);
    assert!(r.iter().all(|row| (row[1].parse::<f64>().unwrap() + 1.0).abs() < 1e-12));
}

#[test]
fn certify_checks_report_verdicts() {
    let cases: [(&[&str], &str); 5] = [
        (&["certify", "--check", "extremum", "--alpha", "0.5", "--f", "poly:0,2,-1", "--b", "3"], "holds"),
        (&["certify", "--check", "comparison", "--alpha", "0.5", "--f", "const:1"], "inconclusive"),
        (&["certify", "--check", "uniqueness", "--id", "3", "--alpha", "0.5"], "holds"),
        (&["certify", "--check", "envelope", "--id", "2", "--alpha", "0.5"], "holds"),
        (&["certify", "--check", "comparison", "--alpha", "0.5", "--f", "const:0"], "holds"),
    ];
    for (args, verdict) in cases {
        let o = fracml(args);
        assert!(o.status.success(), "{args:?}");
        assert_eq!(meta(&stdout(&o), "verdict"), Some(verdict), "{args:?}");
    }
}

#[test]
fn golden_command_matches_frozen_table() {
    let o = fracml(&["golden"]);
    assert!(o.status.success());
    let fresh = fracml::oracles::parse_golden(&stdout(&o)).unwrap();
    let frozen = fracml::oracles::parse_golden(
        &std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden.tsv")).unwrap(),
    )
    .unwrap();
    assert_eq!(fresh, frozen);
}
