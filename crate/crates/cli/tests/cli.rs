use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mcc_tensor::floer::DABimodule;
use serde_json::Value;
use tempfile::TempDir;

fn mcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcc"))
        .args(args)
        .output()
        .expect("mcc runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Compare against `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn assert_golden(name: &str, actual: &str) {
    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(golden_dir()).unwrap();
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

#[test]
fn dims_fig8_csv_rows() {
    let o = mcc(&["dims", "fig8", "2", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "level,dimension\n0,5\n1,9\n2,49\n");
    let flag = mcc(&["dims", "fig8", "2", "--format", "csv"]);
    assert_eq!(flag.stdout, o.stdout);
}

#[test]
fn dims_fig8_json_carries_grading_split_and_cross_check() {
    let o = mcc(&["dims", "fig8", "3"]);
    assert!(o.status.success());
    let r = json(&o);
    assert_eq!(r["passed"], true);
    assert_eq!(r["checks"][0]["name"], "floer_cross_check");
    let row = &r["result"]["rows"][3];
    assert_eq!(row["dimension"], "2209");
    assert_eq!(row["floer_total"], "2209");
    assert_eq!(row["grading_zero"], "2207");
    assert!(r.get("timing_ms").is_none());
    assert_golden("dims_fig8_3.json", &stdout(&o));
}

#[test]
fn dims_single_loop_is_all_ones() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("loop.graph");
    fs::write(&g, "idempotents: i0\nedge a i0 i0\n").unwrap();
    let o = mcc(&["dims", g.to_str().unwrap(), "3", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "level,dimension\n0,1\n1,1\n2,1\n3,1\n");
}

#[test]
fn dims_parse_error_names_line() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("bad.graph");
    fs::write(&g, "idempotents: i0\nedge a i0 nowhere\n").unwrap();
    let o = mcc(&["dims", g.to_str().unwrap(), "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn box_seed_pair_writes_golden_table() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("box.json");
    let o = mcc(&["box", "cfda_tb_inv", "cfda_ta", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let r = json(&o);
    assert_eq!(r["result"]["generators"], 5);
    assert_eq!(r["result"]["terms"], 21);
    assert_eq!(r["artifacts"][0], out.to_str().unwrap());
    let written = DABimodule::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    let shipped = DABimodule::from_json(include_str!("../../core/data/dabimod-box-final.json")).unwrap();
    assert_eq!(written, shipped);
}

#[test]
fn box_from_files_matches_builtins() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data");
    let (b, a) = (data.join("cfda-tb-inv.json"), data.join("cfda-ta.json"));
    let files = mcc(&["box", b.to_str().unwrap(), a.to_str().unwrap()]);
    let builtin = mcc(&["box", "cfda_tb_inv", "cfda_ta"]);
    assert!(files.status.success());
    assert_eq!(json(&files)["result"], json(&builtin)["result"]);
}

#[test]
fn box_square_has_13_generators() {
    let o = mcc(&["box", "cfda_tb_inv", "cfda_ta", "--power", "2"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["result"]["generators"], 13);
}

#[test]
fn box_refuses_explicit_eightfold_power() {
    let o = mcc(&["box", "cfda_tb_inv", "cfda_ta", "--power", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap is"));
}

#[test]
fn malformed_bimodule_exits_nonzero() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"generators\": [}").unwrap();
    let o = mcc(&["box", bad.to_str().unwrap(), "cfda_ta"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    let missing = mcc(&["hh", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn hh_reports_generators_and_certificate() {
    let o = mcc(&["hh", "cfda_tb_inv"]);
    assert!(o.status.success());
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("p.json");
    fs::write(&table, include_str!("../../core/data/dabimod-box-final.json")).unwrap();
    let p = mcc(&["hh", table.to_str().unwrap(), "--format", "text"]);
    assert!(p.status.success());
    let text = stdout(&p).replace(table.to_str().unwrap(), "P");
    assert_golden("hh_box_final.txt", &text);
}

#[test]
fn hh_refuses_mutated_bimodule() {
    let mut v: Value = serde_json::from_str(include_str!("../../core/data/dabimod-box-final.json")).unwrap();
    v["generators"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!({"left": "iota0", "name": "n", "right": "iota1"}));
    v["terms"].as_array_mut().unwrap().push(serde_json::json!({
        "x": "q.g", "inputs": [], "output": "rho2", "y": "n"
    }));
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("mutated.json");
    fs::write(&f, v.to_string()).unwrap();
    let o = mcc(&["hh", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["passed"], false);
    assert!(r["checks"][0]["witness"].as_str().unwrap().contains("P1"));
}

#[test]
fn verify_is_byte_stable_and_seed_only_moves_cases() {
    let a = mcc(&["verify", "--depth-cap", "1"]);
    let b = mcc(&["verify", "--depth-cap", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_golden("verify_depth1.json", &stdout(&a));
    let c = mcc(&["verify", "--depth-cap", "1", "--seed", "7"]);
    assert!(c.status.success());
    let names = |r: &Value| -> Vec<(String, bool)> {
        r["checks"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| (c["name"].as_str().unwrap().to_string(), c["passed"].as_bool().unwrap()))
            .collect()
    };
    assert_eq!(names(&json(&a)), names(&json(&c)));
}

#[test]
fn verify_depth_zero_passes() {
    let o = mcc(&["verify", "--depth-cap", "0", "--format", "text"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("PASS box_table_golden: 21 terms over 5 generators match"));
    assert!(text.ends_with("all checks passed\n"));
}

#[test]
fn verify_timing_and_out() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let o = mcc(&["verify", "--depth-cap", "0", "--timing", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let r = json(&o);
    assert!(r["timing_ms"]["functoriality"].is_u64());
    let saved: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(saved["checks"], r["checks"]);
}

#[test]
fn verify_rejects_depth_cap_above_three() {
    let o = mcc(&["verify", "--depth-cap", "4"]);
    assert!(!o.status.success());
}

#[test]
fn mcc_apply_round_trips_through_window_file() {
    let dir = TempDir::new().unwrap();
    let w = dir.path().join("w.txt");
    let m = dir.path().join("m.txt");
    let out = dir.path().join("out.txt");
    fs::write(&w, "tower: dyadic 2\nbasis: x y\ndepth: 1\nxy 1\n").unwrap();
    fs::write(&m, "rows: a b\ncols: x y\n1 1\n0 1\n").unwrap();
    let o = mcc(&["mcc", "apply", m.to_str().unwrap(), w.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(json(&o)["result"]["support"], serde_json::json!(["aa", "ab"]));
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "tower: dyadic 2\nbasis: a b\ndepth: 1\naa 1\nab 1\n"
    );
    let deeper = mcc(&["mcc", "apply", m.to_str().unwrap(), w.to_str().unwrap(), "--depth", "2"]);
    assert!(deeper.status.success());
    assert_eq!(json(&deeper)["result"]["depth"], 2);
}

#[test]
fn mcc_apply_dimension_mismatch_is_an_error() {
    let dir = TempDir::new().unwrap();
    let w = dir.path().join("w.txt");
    let m = dir.path().join("m.txt");
    fs::write(&w, "tower: dyadic 2\nbasis: x y\ndepth: 1\nxy 1\n").unwrap();
    fs::write(&m, "rows: a\ncols: x y z\n1 1 1\n").unwrap();
    let o = mcc(&["mcc", "apply", m.to_str().unwrap(), w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
