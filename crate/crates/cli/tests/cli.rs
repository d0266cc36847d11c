use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pauli-bounds")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .and_then(|rest| rest.split(',').next())
        .unwrap_or_else(|| panic!("{key} missing in\n{text}"))
        .to_string()
}

#[test]
fn bounds_defaults() {
    let o = run(&["bounds", "--csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(csv_value(&text, "heisenberg_bound"), "1.17005");
    assert_eq!(csv_value(&text, "fisher_bound"), "18.7208");
    assert_eq!(csv_value(&text, "log10_fisher_bound"), "1.27232");

    let spinless = stdout(&run(&["bounds", "--csv", "--q", "1"]));
    assert_eq!(csv_value(&spinless, "C(l,m,d)"), "29.7173");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["bounds", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["bounds", "--d", "0"]).status.code(), Some(1));
    assert_eq!(run(&["scan", "9..3"]).status.code(), Some(1));
    assert_eq!(run(&["atom", "200"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn model_outputs() {
    let o = run(&["model", "hydrogen"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("quantity,exact,numeric,rel_error\n"));
    assert_eq!(csv_value(&text, "r2"), "3");

    let fill = stdout(&run(&["model", "oscillator", "--fill", "20"]));
    let lines: Vec<&str> = fill.lines().collect();
    assert_eq!(lines.len(), 22);
    assert!(lines[1].starts_with("0,2,3,3,9,"));
    assert!(lines[21].starts_with("20,3542,58443,58443,"));
}

#[test]
fn audit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("h");
    let o = run(&["model", "hydrogen", "--write-density", prefix.to_str().unwrap()]);
    assert!(o.status.success());
    let pos = dir.path().join("h_position.dat");
    let mom = dir.path().join("h_momentum.dat");
    assert!(pos.exists() && mom.exists());

    let o = run(&["audit", pos.to_str().unwrap(), "--momentum", mom.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    for check in ["lieb-thirring", "entropic-moment", "heisenberg", "fisher"] {
        let line = text.lines().find(|l| l.starts_with(&format!("{check},"))).expect(check);
        assert!(line.ends_with(",yes"), "{line}");
    }

    // without momentum data the momentum-side checks are skipped
    let text = stdout(&run(&["audit", pos.to_str().unwrap()]));
    assert!(text.lines().any(|l| l == "fisher,,,,,skipped"));
}

fn write_density(path: &Path, f: impl Fn(f64) -> f64, norm: f64) {
    let mut s = format!("# d=3 norm={norm:e}\n");
    for i in 0..2000 {
        let r = 1e-6 * (i as f64 * (5e7f64).ln() / 1999.0).exp();
        s.push_str(&format!("{r:e} {:e}\n", f(r)));
    }
    fs::write(path, s).unwrap();
}

#[test]
fn audit_rejects_bad_densities() {
    let dir = tempfile::tempdir().unwrap();
    let negative = dir.path().join("neg.dat");
    write_density(&negative, |r| (-r).exp() - 0.5 * (-0.5 * r).exp(), 1.0);
    let o = run(&["audit", negative.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));

    let zero = dir.path().join("zero.dat");
    write_density(&zero, |_| 0.0, 1.0);
    let o = run(&["audit", zero.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let missing = dir.path().join("nope.dat");
    assert_eq!(run(&["audit", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn atom_row() {
    let o = run(&["atom", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("Z,N,r2,p2,"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..3], &["1", "1", "3"]);
    assert_eq!(row[row.len() - 3], "-0.5");
    assert_eq!(row[row.len() - 1], "1");
}

#[test]
fn config_file_and_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    let csv = dir.path().join("custom.csv");
    fs::write(
        &config,
        format!("[scf]\nexchange = slater\n\n[output]\ncsv = {}\n", csv.display()),
    )
    .unwrap();
    let o = run(&["atom", "2", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    // local exchange gives a higher energy than Hartree-Fock
    let e: f64 = row[row.len() - 3].parse().unwrap();
    assert!((e + 2.7236).abs() < 1e-3, "{e}");

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[grid]\nn_points = 3\n").unwrap();
    assert_eq!(run(&["atom", "2", "--config", bad.to_str().unwrap()]).status.code(), Some(1));

    let out = dir.path().join("out");
    let o = run(&["scan", "1..3", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let scan = fs::read_to_string(out.join("scan.csv")).unwrap();
    assert_eq!(scan.lines().count(), 4);
    let fig1 = fs::read_to_string(out.join("fig1.dat")).unwrap();
    assert_eq!(fig1.lines().count(), 4);
    assert!(out.join("fig2.dat").exists());
}
