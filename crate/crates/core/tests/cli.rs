use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diagapprox"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn series_csv_second_row() {
    let o = run(&["--places", "2", "--n-max", "2", "--format", "csv", "series"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,S,D,R");
    assert_eq!(lines[2], "2,5/12,7/16,20/21");
}

#[test]
fn report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("r{i}.json"));
            let o = run(&[
                "--places", "2,3", "--n-max", "4", "--overlap-n-max", "3", "--samples", "4000",
                "--seed", "11", "--out", path.to_str().unwrap(), "report",
            ]);
            assert!(matches!(o.status.code(), Some(0 | 2)), "{o:?}");
            fs::read(&path).unwrap()
        })
        .collect();
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn montecarlo_output_follows_seed() {
    let a = run(&["--samples", "3000", "--seed", "1", "montecarlo", "--gammas", "3"]);
    let b = run(&["--samples", "3000", "--seed", "1", "montecarlo", "--gammas", "3"]);
    let c = run(&["--samples", "3000", "--seed", "2", "montecarlo", "--gammas", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v[0]["algorithm"].as_str().unwrap().starts_with("chacha8"));
}

#[test]
fn psi_table_over_cap_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("psi.txt");
    fs::write(&table, "1 1\n").unwrap();
    let o = run(&["--psi", "table", "--psi-table", table.to_str().unwrap(), "measure"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("cap"), "{err}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "# experiment\nplaces = 3\nn_max = 5\nformat = csv\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--n-max", "2", "series"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn dirichlet_example_point() {
    let o = run(&["--places", "2", "--n-max", "8", "dirichlet", "--point", "5/7,1/7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["pass"], true);
    assert_eq!(v[0]["bound"], "1/4");
}

#[test]
fn coprime_pairs_from_cli() {
    let o = run(&["--places", "2", "--n-max", "1000", "dirichlet", "--point", "5/7,1/7", "--count", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["--places", "4", "series"]).status.code(), Some(1));
    assert_eq!(run(&["dirichlet", "--point", "1/3,1/3", "--count", "3"]).status.code(), Some(1));
    // measure bracketing is an equality for gamma = 1 when P = {inf, 2}
    assert_eq!(run(&["--places", "2", "measure", "--gamma", "1"]).status.code(), Some(2));
    assert_eq!(run(&["--places", "3", "measure", "--gamma", "1"]).status.code(), Some(0));
}

#[test]
fn exact_values_are_fraction_strings() {
    let o = run(&["--places", "3", "--n-max", "3", "measure"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for row in v.as_array().unwrap() {
        for key in ["measure", "lower_bound", "upper_bound", "psi"] {
            let s = row[key].as_str().unwrap();
            assert!(s.contains('/'), "{key}: {s}");
        }
    }
}
