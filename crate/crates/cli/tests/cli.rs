// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kernineq"))
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out: Output = bin().args(args).output().unwrap();
    let code = out.status.code().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (code, v, String::from_utf8(out.stderr).unwrap())
}

fn write(dir: &Path, name: &str, v: Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

fn kernel(labels: &[&str], rows: Value) -> Value {
    json!({"points": labels, "values": rows})
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sincov_kernel_passes_defect_scan() {
    let d = tempfile::tempdir().unwrap();
    let t = write(
        d.path(),
        "T.json",
        kernel(&["a", "b", "c"], json!([[1, 0.5, 0.25], [2, 1, 0.5], [4, 2, 1]])),
    );
    let (code, v, _) = run(&["defect", "--kind", "sincov", "--input", s(&t), "--no-timestamp"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["report"]["max_defect"], 0.0);
    assert_eq!(v["report"]["kind"], "sincov");
}

#[test]
fn triangle_example_names_the_witness() {
    let d = tempfile::tempdir().unwrap();
    let h = write(
        d.path(),
        "H.json",
        kernel(&["a", "b", "c"], json!([[0, 1, 5], [1, 0, 1], [5, 1, 0]])),
    );
    let (code, v, _) = run(&["defect", "--kind", "triangle", "--input", s(&h)]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["max_defect"], 3.0);
    assert_eq!(v["report"]["argmax"], json!(["a", "b", "c"]));
    assert!(v.get("timestamp_unix").is_some());
}

#[test]
fn closure_on_negative_cycle_exits_2_and_names_it() {
    let d = tempfile::tempdir().unwrap();
    let h = write(
        d.path(),
        "H.json",
        kernel(&["a", "b"], json!([[0, -1], [-1, 0]])),
    );
    let (code, v, _) = run(&["closure", "--input", s(&h), "--no-timestamp"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "infeasible");
    assert_eq!(v["report"]["error"]["kind"], "negative-cycle");
    assert_eq!(v["report"]["error"]["cycle"], json!(["a", "b"]));
    assert_eq!(v["report"]["error"]["weight"], -2.0);
}

#[test]
fn closure_writes_the_closed_kernel() {
    let d = tempfile::tempdir().unwrap();
    let h = write(
        d.path(),
        "H.json",
        kernel(&["a", "b", "c"], json!([[0, 1, 5], [1, 0, 1], [5, 1, 0]])),
    );
    let out = d.path().join("C.csv");
    let (code, v, _) = run(&["closure", "--input", s(&h), "--write", s(&out)]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["closure"]["values"][0][2], 2.0);
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("a,b,c\n0.0,1.0,2.0\n"), "{text}");
}

#[test]
fn check_add_on_antisymmetric_s_with_zero_g_exits_1() {
    let d = tempfile::tempdir().unwrap();
    let sk = write(
        d.path(),
        "S.json",
        kernel(&["a", "b", "c"], json!([[0, 1, -1], [-1, 0, 1], [1, -1, 0]])),
    );
    let g = write(d.path(), "G.json", kernel(&["a", "b", "c"], json!([[0, 0, 0], [0, 0, 0], [0, 0, 0]])));
    let (code, v, _) = run(&["check-add", "--s", s(&sk), "--g", s(&g)]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "violated");
    assert_eq!(v["report"]["argmax"].as_array().unwrap().len(), 3);
    assert!(v["report"]["violations"].as_u64().unwrap() > 0);
}

#[test]
fn unknown_subcommand_and_bad_files_exit_3() {
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 3);
    assert!(err.contains("Usage"), "{err}");
    let (code, _, err) = run(&["defect", "--kind", "sincov", "--input", "/nonexistent/T.json"]);
    assert_eq!(code, 3);
    assert!(err.contains("/nonexistent/T.json"), "{err}");
    let (code, _, _) = run(&["defect", "--kind", "nope", "--input", "x.json"]);
    assert_eq!(code, 3);
    let (code, _, _) = run(&["richard", "--dim", "1", "--trials", "5"]);
    assert_eq!(code, 3);
    let (code, _, _) = run(&["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn malformed_kernel_reports_location() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path().join("bad.json");
    std::fs::write(&p, "{\"points\": [\"a\"],\n\"values\": [[1, 2]]}").unwrap();
    let (code, _, err) = run(&["defect", "--kind", "triangle", "--input", s(&p)]);
    assert_eq!(code, 3);
    assert!(err.contains("non-square"), "{err}");
}

#[test]
fn out_flag_writes_the_report() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("r.json");
    let (code, v, _) = run(&["gen", "--kind", "sincov", "--n", "3", "--seed", "7", "--out", s(&out)]);
    assert_eq!(code, 0);
    assert_eq!(v, Value::Null);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r["report"]["check"]["kind"], "sincov");
    assert!(r["report"]["check"]["max_defect"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn generated_pairs_feed_other_commands() {
    let d = tempfile::tempdir().unwrap();
    let dir = s(d.path());
    assert_eq!(run(&["gen", "--kind", "main-pair", "--n", "5", "--seed", "9", "--dir", dir]).0, 0);
    let t = d.path().join("T.json");
    let f = d.path().join("F.json");
    assert_eq!(run(&["check-main", "--t", s(&t), "--f", s(&f)]).0, 0);
    let (code, v, _) = run(&["probe", "--t", s(&t), "--f", s(&f)]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["bound_1_ok"], true);
    assert_eq!(run(&["gamma", "--f", s(&f)]).0, 0);
    assert_eq!(run(&["zero-prop", "--f", s(&f)]).0, 0);

    assert_eq!(run(&["gen", "--kind", "add-pair", "--n", "5", "--seed", "1", "--dir", dir]).0, 0);
    let sk = d.path().join("S.json");
    let g = d.path().join("G.json");
    assert_eq!(run(&["check-add", "--s", s(&sk), "--g", s(&g)]).0, 0);
    let (code, v, _) = run(&["decompose", "--s", s(&sk), "--g", s(&g)]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["inverse_bit_exact"], true);
    let (code, v, _) = run(&["synth-g", "--s", s(&sk)]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["status"], "optimal");
    assert!(v["report"]["g"]["values"].is_array());
}

#[test]
fn compose_and_swapped_compose() {
    let d = tempfile::tempdir().unwrap();
    let m = write(
        d.path(),
        "M.json",
        kernel(&["a", "b", "c"], json!([[0, 1, 1], [1, 0, 1], [1, 1, 0]])),
    );
    let (code, v, _) = run(&["compose", "--h1", s(&m), "--h2", s(&m)]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["s"]["values"][0][1], 0.0);
    let (code, v, _) = run(&["compose", "--h1", s(&m), "--h2", s(&m), "--swapped"]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["swapped"], true);
}

#[test]
fn synth_g_two_point_value() {
    let d = tempfile::tempdir().unwrap();
    let sk = write(d.path(), "S.json", kernel(&["a", "b"], json!([[0, 1], [1, 0]])));
    let (code, v, _) = run(&["synth-g", "--s", s(&sk), "--objective", "sum"]);
    assert_eq!(code, 0);
    assert!((v["report"]["value"].as_f64().unwrap() - 2.0).abs() <= 1e-7);
    let (code, v, _) = run(&["synth-g", "--s", s(&sk), "--objective", "max", "--symmetric", "--zero-diagonal"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["symmetric"], true);
}

#[test]
fn represent_and_verify_ct() {
    let d = tempfile::tempdir().unwrap();
    let h = write(
        d.path(),
        "H.json",
        kernel(&["a", "b", "c"], json!([[0, 1, 2], [1, 0, 1], [2, 1, 0]])),
    );
    let (code, v, _) = run(&["represent", "--input", s(&h)]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["representation_error"], 0.0);
    let fam = write(d.path(), "fam.json", v["report"]["family"].clone());
    let (code, v2, _) = run(&["represent", "--family", s(&fam)]);
    assert_eq!(code, 0);
    assert_eq!(v2["report"]["kernel"], v["report"]["kernel"]);
    let (code, v, _) = run(&["verify-ct", "--input", s(&h)]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["biconditional_holds"], true);

    let bad = write(
        d.path(),
        "B.json",
        kernel(&["a", "b", "c"], json!([[0, 1, 5], [1, 0, 1], [5, 1, 0]])),
    );
    let (code, v, _) = run(&["verify-ct", "--input", s(&bad)]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["representation_matches"], false);
    assert_eq!(v["report"]["biconditional_holds"], true);

    let (code, v, _) = run(&["build-ch", "--family1", s(&fam), "--family2", s(&fam)]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["holds"], true);
}

#[test]
fn factorize_and_pams() {
    let d = tempfile::tempdir().unwrap();
    let t = write(
        d.path(),
        "T.json",
        kernel(&["a", "b", "c"], json!([[1, 0.5, 0.25], [2, 1, 0.5], [4, 2, 1]])),
    );
    let (code, v, _) = run(&["factorize", "--t", s(&t), "--base", "b"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["factor"]["values"], json!([0.5, 1.0, 2.0]));
    let (code, v, _) = run(&["pams", "--t", s(&t)]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["constant"], 0.0);
    assert_eq!(v["report"]["constant_f"], 1.0);

    let bad = write(d.path(), "N.json", kernel(&["a", "b"], json!([[1, 2], [2, 1]])));
    let (code, v, _) = run(&["factorize", "--t", s(&bad)]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["error"]["kind"], "not-sincov");

    let z = write(d.path(), "Z.json", kernel(&["a", "b"], json!([[1, 0], [0, 0]])));
    let (code, v, _) = run(&["factorize", "--t", s(&z), "--tolerance", "2"]);
    assert_eq!(code, 2);
    assert_eq!(v["report"]["error"]["kind"], "vanishing-factor");
    assert_eq!(v["report"]["error"]["label"], "b");
}

#[test]
fn gamma_on_non_positive_kernel_exits_2() {
    let d = tempfile::tempdir().unwrap();
    let f = write(d.path(), "F.json", kernel(&["a", "b"], json!([[1, 0], [1, 1]])));
    let (code, v, _) = run(&["gamma", "--f", s(&f)]);
    assert_eq!(code, 2);
    assert_eq!(v["report"]["error"]["kind"], "non-positive");
}

#[test]
fn zero_prop_names_a_violated_triple() {
    let d = tempfile::tempdir().unwrap();
    let f = write(
        d.path(),
        "F.json",
        kernel(&["a", "b", "c"], json!([[1, 0, 1], [1, 1, 1], [1, 1, 1]])),
    );
    let (code, v, _) = run(&["zero-prop", "--f", s(&f)]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["verdict"], "hypothesis-violated");
    assert_eq!(v["report"]["witness"].as_array().unwrap().len(), 3);
}

#[test]
fn gruss_files_and_richard_forms() {
    let d = tempfile::tempdir().unwrap();
    let n = 256;
    let step: Vec<f64> = (0..=n).map(|i| if i < n / 2 { -1.0 } else { 1.0 }).collect();
    let f = write(
        d.path(),
        "f.json",
        json!({"a": 0.0, "b": 1.0, "values": step, "breaks": [[n / 2, -1.0]]}),
    );
    let (code, v, _) = run(&["gruss", "--f", s(&f), "--g", s(&f)]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["lhs"], 1.0);
    assert_eq!(v["report"]["rhs"], 1.0);
    assert_eq!(v["report"]["bounds_f_source"], "sampled");

    let a = run(&["gruss", "richard", "--dim", "3", "--trials", "2000", "--seed", "5", "--no-timestamp"]);
    let b = run(&["richard", "--dim", "3", "--trials", "2000", "--seed", "5", "--no-timestamp"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1["report"], b.1["report"]);
    assert_eq!(a.1["command"], "gruss richard");
    assert_eq!(run(&["gruss"]).0, 3);
}

#[test]
fn reports_are_byte_identical_without_timestamp() {
    let args = ["gen", "--kind", "add-pair", "--n", "6", "--seed", "3", "--no-timestamp"];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8(a.stdout).unwrap().contains("timestamp"));
}

#[test]
fn complex_t_is_accepted() {
    let d = tempfile::tempdir().unwrap();
    // T(f,g) = exp(i(θf − θg)) split into real and imaginary parts.
    let th = [0.0f64, 0.7, 2.0];
    let re: Vec<Vec<f64>> = th.iter().map(|a| th.iter().map(|b| (a - b).cos()).collect()).collect();
    let im: Vec<Vec<f64>> = th.iter().map(|a| th.iter().map(|b| (a - b).sin()).collect()).collect();
    let labels = ["a", "b", "c"];
    let t = write(d.path(), "re.json", kernel(&labels, json!(re)));
    let ti = write(d.path(), "im.json", kernel(&labels, json!(im)));
    let f = write(d.path(), "F.json", kernel(&labels, json!([[1, 1, 1], [1, 1, 1], [1, 1, 1]])));
    let (code, v, _) = run(&["check-main", "--t", s(&t), "--t-im", s(&ti), "--f", s(&f)]);
    assert_eq!(code, 0, "{v}");
}
