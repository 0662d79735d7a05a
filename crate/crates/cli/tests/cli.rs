//! End-to-end runs of the `iotprice` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use iotprice_core::quality::{generate_synthetic, write_samples_csv};
use iotprice_core::QualityCurve;
use tempfile::TempDir;

const SERVICE1: &str = "cost = 0.1\nalpha1 = 0.884\nalpha2 = 0.59\nalpha3 = 0.114\n";
const SERVICE2: &str = "cost = 0.05\nalpha1 = 0.82\nalpha2 = 0.069\nalpha3 = 0.142\n";

fn iotprice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iotprice"))
        .args(args)
        .output()
        .expect("spawn iotprice")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(o: &Output, key: &str) -> String {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_owned))
        .unwrap_or_else(|| panic!("no {key} in:\n{}", stdout(o)))
}

fn num(o: &Output, key: &str) -> f64 {
    value(o, key).parse().unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn bundle_config(dir: &TempDir, extra: &str) -> PathBuf {
    write(
        dir,
        "bundle.toml",
        &format!("customers = 50\n[service.1]\n{SERVICE1}[service.2]\n{SERVICE2}{extra}"),
    )
}

#[test]
fn fit_recovers_noiseless_curve() {
    let dir = TempDir::new().unwrap();
    let curve = QualityCurve::new(0.884, 0.59, 0.114).unwrap();
    let sizes: Vec<f64> = (1..=100).map(f64::from).collect();
    let mut buf = Vec::new();
    write_samples_csv(&mut buf, &generate_synthetic(&curve, &sizes, 0.0, 1).unwrap()).unwrap();
    let csv = dir.path().join("s1.csv");
    std::fs::write(&csv, buf).unwrap();

    let o = iotprice(&["fit", s(&csv)]);
    assert!(o.status.success());
    assert!((num(&o, "alpha1") - 0.884).abs() <= 1e-6);
    assert!((num(&o, "alpha2") - 0.59).abs() <= 1e-6);
    assert!((num(&o, "alpha3") - 0.114).abs() <= 1e-6);
    assert_eq!(value(&o, "degenerate"), "false");

    let report = dir.path().join("fit.txt");
    let o = iotprice(&["fit", s(&csv), "--out", s(&report)]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(report).unwrap().contains("alpha1=0.884"));
}

#[test]
fn fit_input_errors() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.csv", "");
    assert_eq!(iotprice(&["fit", s(&empty)]).status.code(), Some(2));

    let bad = write(&dir, "bad.csv", "n,accuracy\n1,0.5\n2,zero\n3,0.7\n");
    let o = iotprice(&["fit", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&o.stderr).contains("line 3"),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let two = write(&dir, "two.csv", "n,accuracy\n1,0.5\n2,0.6\n2,0.61\n");
    assert_eq!(iotprice(&["fit", s(&two)]).status.code(), Some(3));

    assert_eq!(iotprice(&["fit", "/no/such/file.csv"]).status.code(), Some(2));
}

#[test]
fn fit_flags_constant_data() {
    let dir = TempDir::new().unwrap();
    let flat = write(&dir, "flat.csv", "n,accuracy\n1,0.7\n2,0.7\n5,0.7\n9,0.7\n");
    let o = iotprice(&["fit", s(&flat)]);
    assert!(o.status.success());
    assert_eq!(value(&o, "degenerate"), "true");
    assert_eq!(num(&o, "alpha1"), 0.7);
    assert_eq!(num(&o, "alpha2"), 0.0);
}

#[test]
fn standalone_reports() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "s1.toml", &format!("customers = 50\n[service.1]\n{SERVICE1}"));
    let o = iotprice(&["standalone", "--config", s(&cfg)]);
    assert!(o.status.success());
    assert!((num(&o, "n_star") - 18.68).abs() <= 0.01);
    assert!((num(&o, "ps_star") - 0.407).abs() <= 0.001);
    assert!((num(&o, "profit") - 8.31).abs() <= 0.01);
    assert_eq!(value(&o, "interior"), "true");

    let costly = write(
        &dir,
        "c09.toml",
        &format!("customers = 50\n[service.1]\n{}", SERVICE1.replace("0.1\n", "0.9\n")),
    );
    let o = iotprice(&["standalone", "--config", s(&costly)]);
    assert!(o.status.success());
    assert_eq!(value(&o, "interior"), "false");
    assert_eq!(num(&o, "n_star"), 0.0);

    let zero = write(&dir, "m0.toml", &format!("customers = 0\n[service.1]\n{SERVICE1}"));
    assert_eq!(iotprice(&["standalone", "--config", s(&zero)]).status.code(), Some(2));
}

#[test]
fn standalone_picks_service_block() {
    let dir = TempDir::new().unwrap();
    let cfg = bundle_config(&dir, "");
    let o = iotprice(&["standalone", "--config", s(&cfg), "--service", "2"]);
    assert!(o.status.success());
    assert!((num(&o, "profit") - 9.58).abs() <= 0.01);
    assert_eq!(
        iotprice(&["standalone", "--config", s(&cfg), "--service", "3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_can_fit_samples() {
    let dir = TempDir::new().unwrap();
    let curve = QualityCurve::new(0.82, 0.069, 0.142).unwrap();
    let sizes: Vec<f64> = (1..=100).map(f64::from).collect();
    let mut buf = Vec::new();
    write_samples_csv(&mut buf, &generate_synthetic(&curve, &sizes, 0.0, 1).unwrap()).unwrap();
    std::fs::write(dir.path().join("s2.csv"), buf).unwrap();
    let cfg = write(
        &dir,
        "fitted.toml",
        "customers = 50\n[service.1]\ncost = 0.05\nsamples = \"s2.csv\"\n",
    );
    let o = iotprice(&["standalone", "--config", s(&cfg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((num(&o, "profit") - 9.58).abs() <= 0.01);
}

#[test]
fn bundle_reports_optimum_and_sharing() {
    let dir = TempDir::new().unwrap();
    let o = iotprice(&["bundle", "--config", s(&bundle_config(&dir, ""))]);
    assert!(o.status.success());
    assert_eq!(value(&o, "case"), "1");
    assert!((num(&o, "pb_star") - 0.658).abs() <= 0.001);
    assert!((num(&o, "profit") - 19.67).abs() <= 0.01);
    assert!((num(&o, "shapley1") - 9.20).abs() <= 0.01);
    assert!((num(&o, "shapley2") - 10.47).abs() <= 0.01);
    assert!((num(&o, "core_lo") - 8.31).abs() <= 0.01);
    assert!((num(&o, "core_hi") - 10.09).abs() <= 0.01);
    assert_eq!(value(&o, "core_empty"), "false");
    assert!(!stdout(&o).contains("diagnostic."));
}

#[test]
fn bundle_reports_empty_core() {
    let dir = TempDir::new().unwrap();
    let cfg = bundle_config(
        &dir,
        "[sharing]\nstandalone1_profit = 12.0\nstandalone2_profit = 9.58\n",
    );
    let o = iotprice(&["bundle", "--config", s(&cfg)]);
    assert!(o.status.success());
    assert_eq!(value(&o, "core_empty"), "true");
    assert!(!stdout(&o).contains("core_lo="));
}

#[test]
fn bundle_needs_two_services() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "one.toml", &format!("customers = 50\n[service.1]\n{SERVICE1}"));
    let o = iotprice(&["bundle", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn bundle_diagnose_flags_printed_forms() {
    let dir = TempDir::new().unwrap();
    let o = iotprice(&["bundle", "--config", s(&bundle_config(&dir, "")), "--diagnose"]);
    assert!(o.status.success());
    assert!((num(&o, "diagnostic.case1.printed_pb") - 0.81).abs() < 0.01);
    assert_eq!(value(&o, "diagnostic.case1.status"), "MISMATCH");
}

#[test]
fn sweep_single_step_matches_bundle() {
    let dir = TempDir::new().unwrap();
    let cfg = bundle_config(&dir, "[sweep]\nparameter = \"c1\"\nlo = 0.1\nhi = 0.9\nsteps = 1\n");
    let sweep = stdout(&iotprice(&["sweep", "--config", s(&cfg)]));
    let bundle = iotprice(&["bundle", "--config", s(&cfg)]);
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines[0], "c1,n1_star,n2_star,pb_star,case,profit");
    assert_eq!(lines.len(), 2);
    let expected = format!(
        "0.1,{},{},{},{},{}",
        value(&bundle, "n1_star"),
        value(&bundle, "n2_star"),
        value(&bundle, "pb_star"),
        value(&bundle, "case"),
        value(&bundle, "profit")
    );
    assert_eq!(lines[1], expected);
}

#[test]
fn sweep_with_sharing_columns() {
    let dir = TempDir::new().unwrap();
    let cfg = bundle_config(
        &dir,
        "[sweep]\nparameter = \"M\"\nlo = 10\nhi = 200\nsteps = 5\nsharing = true\n",
    );
    let out = dir.path().join("m.csv");
    let o = iotprice(&["sweep", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "rows=5\n");
    let text = std::fs::read_to_string(out).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        [
            "M",
            "n1_star",
            "n2_star",
            "pb_star",
            "case",
            "profit",
            "standalone1_profit",
            "standalone2_profit",
            "shapley1",
            "shapley2",
            "core_lo",
            "core_hi",
            "core_empty"
        ]
    );
    let params: Vec<String> = rdr.records().map(|r| r.unwrap()[0].to_owned()).collect();
    assert_eq!(params, ["10", "58", "105", "153", "200"]);
}

#[test]
fn sweep_rejects_bad_parameters() {
    let dir = TempDir::new().unwrap();
    let unknown = bundle_config(&dir, "[sweep]\nparameter = \"beta\"\nlo = 0\nhi = 1\nsteps = 3\n");
    assert_eq!(iotprice(&["sweep", "--config", s(&unknown)]).status.code(), Some(2));

    let wrong = write(
        &dir,
        "wrong.toml",
        &format!("customers = 50\n[service.1]\n{SERVICE1}[sweep]\nparameter = \"c1\"\nlo = 0\nhi = 1\nsteps = 3\n"),
    );
    assert_eq!(iotprice(&["sweep", "--config", s(&wrong)]).status.code(), Some(2));

    let none = bundle_config(&dir, "");
    assert_eq!(iotprice(&["sweep", "--config", s(&none)]).status.code(), Some(2));
}

#[test]
fn sweep_is_deterministic_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let cfg = bundle_config(&dir, "[sweep]\nparameter = \"c1\"\nlo = 0.02\nhi = 0.9\nsteps = 12\n");
    let a = iotprice(&["sweep", "--config", s(&cfg)]);
    let b = iotprice(&["sweep", "--config", s(&cfg)]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let text = stdout(&a);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    for record in rdr.records() {
        for field in record.unwrap().iter() {
            let x: f64 = field.parse().unwrap();
            assert_eq!(iotprice_core::numfmt::sig9(x), field);
        }
    }
}

#[test]
fn simulate_reports() {
    let dir = TempDir::new().unwrap();
    let cfg = bundle_config(&dir, "");
    let a = iotprice(&["simulate", "--config", s(&cfg), "--samples", "1000000", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(value(&a, "result"), "PASS");
    assert!((num(&a, "analytic") - 2.0 / 3.0).abs() < 1e-6);
    let b = iotprice(&["simulate", "--config", s(&cfg), "--samples", "1000000", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);

    let free = bundle_config(&dir, "[simulate]\nfee = 0\n");
    let o = iotprice(&["simulate", "--config", s(&free), "--samples", "10000"]);
    assert_eq!(num(&o, "analytic"), 1.0);
    assert_eq!(num(&o, "mc_mean"), 1.0);
    assert_eq!(value(&o, "result"), "PASS");

    let single = write(&dir, "one.toml", &format!("customers = 50\n[service.1]\n{SERVICE1}"));
    let o = iotprice(&["simulate", "--config", s(&single), "--samples", "200000"]);
    assert_eq!(value(&o, "market"), "standalone");
    assert!((num(&o, "analytic") - 0.5).abs() < 1e-9);
    assert_eq!(value(&o, "result"), "PASS");

    assert_eq!(
        iotprice(&["simulate", "--config", s(&cfg), "--samples", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn malformed_config_never_panics() {
    let dir = TempDir::new().unwrap();
    for (i, body) in [
        "",
        "customers = \"many\"",
        "[service.1]\ncost = 0.1",
        "customers = 50\n[service.1]\ncost = -1\nalpha1 = 0.5\nalpha2 = 0.1\nalpha3 = 0.1\n",
        "\u{0}\u{1}",
    ]
    .iter()
    .enumerate()
    {
        let cfg = write(&dir, &format!("bad{i}.toml"), body);
        for cmd in ["standalone", "bundle", "sweep", "simulate"] {
            let o = iotprice(&[cmd, "--config", s(&cfg)]);
            assert_eq!(o.status.code(), Some(2), "{cmd} on {body:?}");
            assert!(!String::from_utf8_lossy(&o.stderr).contains("panicked"));
        }
    }
}
