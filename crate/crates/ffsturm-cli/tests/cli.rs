use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ffsturm::drinfeld::DrinfeldJson;
use ffsturm::elliptic::{ApTable, Verdict};
use ffsturm::graph::GraphJson;
use ffsturm::hecke::OperatorJson;
use ffsturm::sturm::BoundReport;
use ffsturm::tables::LevelReport;
use serde::de::DeserializeOwned;

fn ffsturm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffsturm"))
        .args(args)
        .env_remove("FFSTURM_CACHE")
        .output()
        .expect("spawn ffsturm")
}

fn ok_json<T: DeserializeOwned>(args: &[&str]) -> T {
    let out = ffsturm(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stdout(args: &[&str]) -> String {
    let out = ffsturm(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(ffsturm(&["--help"]).status.code(), Some(0));
    assert_eq!(ffsturm(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(ffsturm(&["bounds", "--q", "6", "--level", "T^3"]).status.code(), Some(3));
    assert_eq!(ffsturm(&["bounds", "--q", "3", "--level", "2*T^3"]).status.code(), Some(3));
    assert_eq!(ffsturm(&["ttable", "--q", "2", "--nmin", "6", "--nmax", "5"]).status.code(), Some(3));
    assert_eq!(ffsturm(&["drinfeld-bound", "--q", "3", "--level", "T", "--k", "4", "--type", "5"]).status.code(), Some(3));
}

#[test]
fn graph_json_to_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let printed: GraphJson = ok_json(&["graph", "--q", "2", "--level", "T^3+T+1"]);
    let out = ffsturm(&["graph", "--q", "2", "--level", "T^3+T+1", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written: GraphJson = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(printed, written);
    assert_eq!(printed.q, 2);
    assert_eq!(printed.ends.len(), 2);
}

#[test]
fn operator_and_report_documents() {
    let op: OperatorJson = ok_json(&["hecke", "--q", "2", "--level", "T^4", "--m", "T+1"]);
    assert_eq!(op.matrix.len(), op.dim);
    assert!(op.matrix.iter().all(|row| row.len() == op.dim));

    let w: OperatorJson = ok_json(&["hecke", "--q", "3", "--level", "T^3+2*T+1", "--m", "T^3+2*T+1", "--atkin-lehner"]);
    assert_eq!(w.matrix.len(), w.dim);

    let b: BoundReport = ok_json(&["bounds", "--q", "2", "--level", "T^5+T^2+1", "--true"]);
    let bt = b.b_true.expect("b_true requested");
    assert!(bt <= b.b_prime && bt <= b.thm03);

    let r: LevelReport = ok_json(&["report", "--q", "3", "--level", "T^2"]);
    assert!(r.trivial);

    let d: DrinfeldJson = ok_json(&["drinfeld-bound", "--q", "3", "--level", "T^2+1", "--k", "7", "--type", "0"]);
    assert_eq!(d.kappa, 10);
    assert!(d.warning.is_some());
}

#[test]
fn jobs_do_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let serial = stdout(&["compare-bounds", "--q", "2", "--nmax", "6", "--json"]);
    let parallel = stdout(&["compare-bounds", "--q", "2", "--nmax", "6", "--json", "--jobs", "3"]);
    let cached = stdout(&["--cache-dir", cache, "compare-bounds", "--q", "2", "--nmax", "6", "--json", "--jobs", "2"]);
    let warm = stdout(&["--cache-dir", cache, "compare-bounds", "--q", "2", "--nmax", "6", "--json"]);
    assert_eq!(serial, parallel);
    assert_eq!(serial, cached);
    assert_eq!(serial, warm);
    assert!(fs::read_dir(dir.path()).unwrap().next().is_some());

    let t1 = stdout(&["ttable", "--q", "2", "--mmax", "2", "--nmax", "8"]);
    let t2 = stdout(&["ttable", "--q", "2", "--mmax", "2", "--nmax", "8", "--jobs", "4"]);
    assert_eq!(t1, t2);
}

#[test]
fn ttable_timeout_is_partial() {
    let out = ffsturm(&["ttable", "--q", "3", "--m", "2", "--nmin", "8", "--nmax", "8", "--timeout", "0.000001"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("timeout"));
}

fn write_curve(dir: &Path, name: &str, a4: &str, a6: &str, split_at_linear: bool) -> String {
    let kind = if split_at_linear { "split" } else { "nonsplit" };
    let doc = serde_json::json!({
        "q": 5,
        "a": ["0", "0", "0", a4, a6],
        "conductor": "T^3+3",
        "bad": [{"p": "T+2", "type": kind}, {"p": "T^2+3*T+4", "type": "split"}],
    });
    let curve = dir.join(format!("{name}.json"));
    fs::write(&curve, doc.to_string()).unwrap();
    let table = dir.join(format!("{name}.ap.json"));
    fs::write(&table, stdout(&["ap", "--curve", curve.to_str().unwrap(), "--maxdeg", "2"])).unwrap();
    table.to_str().unwrap().to_string()
}

#[test]
fn isogeny_of_a_curve_and_its_twist() {
    let dir = tempfile::tempdir().unwrap();
    // y² = x³ + Tx + 1 and its twist by the non-square 2.
    let e = write_curve(dir.path(), "e", "T", "1", true);
    let twist = write_curve(dir.path(), "twist", "4*T", "3", false);

    let table: ApTable = serde_json::from_str(&fs::read_to_string(&e).unwrap()).unwrap();
    assert_eq!(table.entries.len(), 5 + 10);
    for entry in &table.entries {
        let size = if entry.p.contains("T^2") { 25 } else { 5 };
        assert!(entry.ap * entry.ap <= 4 * size, "{entry:?}");
    }

    let args = |a: &str, b: &str| -> Verdict {
        ok_json(&["isogeny", "--q", "5", "--conductor", "T^3+3", "--t1", a, "--t2", b])
    };
    assert_eq!(args(&e, &e), Verdict::Isogenous);
    assert!(matches!(args(&e, &twist), Verdict::NotIsogenous { .. }));
}
