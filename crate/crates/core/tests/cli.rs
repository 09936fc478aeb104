use std::process::Command;

use kvol::cli_reports::{
    cmd_diagrams, cmd_enumerate, cmd_hyp_reduce, cmd_kvol_closed, cmd_ngon, cmd_pairing, cmd_scan, cmd_verify, round15, RunConfig,
};
use kvol::flat_core::Model;
use kvol::hecke_hyperbolic::UHPoint;
use kvol::kvol_engine::Grid;
use kvol::Error;

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn cfg(n: usize, model: Model, lmax: f64) -> RunConfig {
    RunConfig { n, model, lmax, ..RunConfig::default() }
}

#[test]
fn library_outputs_match_goldens() {
    assert_eq!(cmd_diagrams(7).unwrap(), golden("diagrams_7.txt"));
    assert_eq!(cmd_hyp_reduce(5, "3.2+0.4i").unwrap(), golden("hyp_reduce.json"));
    assert_eq!(cmd_kvol_closed(&cfg(7, Model::Double, 2.2), &UHPoint::new(0.3, 1.2).unwrap()).unwrap(), golden("kvol_closed.json"));
    assert_eq!(cmd_enumerate(&cfg(5, Model::Double, 1.2)).unwrap(), golden("enumerate_double5.csv"));
    assert_eq!(cmd_pairing(&cfg(5, Model::Double, 1.2), true).unwrap(), golden("pairing_double5.json"));
    assert_eq!(cmd_ngon(&cfg(5, Model::Staircase, 2.2)).unwrap(), golden("ngon_staircase5.json"));
    let scan = cmd_scan(&RunConfig { grid: Grid { nx: 3, ny: 3, y_max: 2.0 }, ..cfg(5, Model::Double, 4.0) }).unwrap();
    assert_eq!(scan.csv, golden("scan_small.csv"));
    assert_eq!(scan.summary, golden("scan_small.json"));
}

#[test]
fn binary_is_a_thin_adapter() {
    let out = Command::new(env!("CARGO_BIN_EXE_kvol")).args(["diagrams", "--n", "7"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("diagrams_7.txt"));
    let out = Command::new(env!("CARGO_BIN_EXE_kvol")).args(["hyp", "reduce", "--n", "5", "--z", "3.2+0.4i"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("hyp_reduce.json"));
    let out = Command::new(env!("CARGO_BIN_EXE_kvol")).args(["verify", "--n", "4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn heptagon_rows_read_like_the_table() {
    let text = cmd_diagrams(7).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[2], "Σ2 : e2 ⇋ e3 ⇋ e1 ⇋ e4 ⇋ e0 ⇋ e5 ⇋ e6");
    assert_eq!(rows[6], "Σ6 : e4 ⇋ e5 ⇋ e3 ⇋ e6 ⇋ e2 ⇋ e0 ⇋ e1");
    let five = cmd_diagrams(5).unwrap();
    for row in five.lines() {
        let mut labels: Vec<&str> = row.split(" : ").nth(1).unwrap().split(" ⇋ ").collect();
        labels.sort();
        assert_eq!(labels, ["e0", "e1", "e2", "e3", "e4"]);
    }
}

#[test]
fn csv_is_rfc4180_with_short_floats() {
    let text = cmd_enumerate(&cfg(7, Model::Staircase, 2.0)).unwrap();
    assert!(text.ends_with("\r\n"));
    assert!(text.split("\r\n").all(|l| !l.contains('\n')));
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(r.headers().unwrap(), vec!["hol_x", "hol_y", "length", "angle", "crossings", "homology"]);
    let mut crossed = false;
    for rec in r.records() {
        let rec = rec.unwrap();
        assert_eq!(rec.len(), 6);
        for f in rec.iter().take(4) {
            let x: f64 = f.parse().unwrap();
            assert_eq!(x, round15(x));
        }
        crossed |= !rec[4].is_empty();
    }
    assert!(crossed);
}

#[test]
fn configuration_is_checked_first() {
    assert!(matches!(cmd_verify(&RunConfig { n: 4, ..RunConfig::default() }), Err(Error::Config(_))));
    assert!(cmd_enumerate(&cfg(5, Model::Fixture, 1.0)).is_err());
    assert!(cmd_enumerate(&cfg(5, Model::Double, -1.0)).is_err());
    assert!(cmd_scan(&RunConfig { grid: Grid { nx: 1, ny: 5, y_max: 2.0 }, ..RunConfig::default() }).is_err());
    assert!(cmd_hyp_reduce(5, "3.2-0.4i").is_err());
    assert!(cmd_hyp_reduce(5, "nonsense").is_err());
    assert!("fast".parse::<kvol::cli_reports::Precision>().is_err());
}

#[test]
fn verify_is_deterministic_for_a_seed() {
    let c = RunConfig { seed: 7, ..RunConfig::default() };
    let a = kvol::cli_reports::to_json(&cmd_verify(&c).unwrap()).unwrap();
    let b = kvol::cli_reports::to_json(&cmd_verify(&c).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with("{\n  \"schema\": \"kvol-report/1\""));
}

#[test]
fn rounding_keeps_fifteen_digits() {
    assert_eq!(round15(1.0 / 3.0), 0.333333333333333);
    assert_eq!(round15(2.0 / 3.0), 0.666666666666667);
    assert_eq!(round15(0.0), 0.0);
    assert_eq!(round15(-1234.5678901234567), -1234.56789012346);
}
