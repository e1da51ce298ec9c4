use std::path::Path;
use std::process::{Command, Output};

use latmap::exactpoly::rational::{frac, int};
use latmap::gauge::{conjugate, GaugeTransformation};
use latmap::lattice::enumerate_faces;
use latmap::maps::expand_darboux;
use latmap::{Face, MapFamily, Monomial, Polynomial};
use serde_json::Value;
use tempfile::TempDir;

fn latmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latmap")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_darboux_is_consistent() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "darboux.json", &expand_darboux(6).to_json());
    let report = dir.path().join("report.json");
    let out = latmap(&["verify", "--order", "6", &file, "--output", s(&report)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(written.is_object());
    assert!(String::from_utf8_lossy(&out.stdout).contains("consistent through degree 6"));
}

#[test]
fn verify_truncated_darboux_fails_at_degree_four() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "d2.json", &expand_darboux(2).to_json());
    let out = latmap(&["verify", "--order", "4", "--input", &file]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("first failure at degree 4"));
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"n\": 4, \"order\": ");
    assert_eq!(code(&latmap(&["verify", &bad])), 2);
    let wrong = write(&dir, "wrong.json", "{\"n\": 4, \"order\": 2, \"components\": 7}");
    assert_eq!(code(&latmap(&["verify", &wrong])), 2);
    assert_eq!(code(&latmap(&["verify", s(&dir.path().join("missing.json"))])), 2);
    assert_eq!(code(&latmap(&["classify", &bad])), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&latmap(&["verify", "--order", "1", "x.json"])), 2);
    assert_eq!(code(&latmap(&["numeric-check", "--map", "darboux", "--trials", "0"])), 2);
    assert_eq!(code(&latmap(&["numeric-check", "--map", "darboux", "--tolerance", "-1"])), 2);
    assert_eq!(code(&latmap(&["numeric-check", "--map", "klein"])), 2);
    assert_eq!(code(&latmap(&["frobnicate"])), 2);
    assert_eq!(code(&latmap(&["verify"])), 2);
}

#[test]
fn expand_darboux_order_two_is_the_normal_form() {
    let out = latmap(&["expand-darboux", "--order", "2"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let comps = v["components"].as_array().unwrap();
    assert_eq!(comps.len(), 12);
    for c in comps {
        let terms = c["terms"].as_array().unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0]["coeff"], "1");
        assert_eq!(terms[0]["exps"], serde_json::json!({"ik": 1, "jk": 1}));
    }
}

#[test]
fn expand_darboux_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(code(&latmap(&["expand-darboux", "--order", "5", "--output", s(&a)])), 0);
    assert_eq!(code(&latmap(&["expand-darboux", "--order", "5", "--output", s(&b)])), 0);
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, latmap(&["expand-darboux", "--order", "5"]).stdout);
    assert_eq!(MapFamily::from_json(std::str::from_utf8(&a).unwrap()).unwrap(), expand_darboux(5));
}

#[test]
fn classify_reports_kernel_dimensions() {
    let out = latmap(&["classify", "--order", "5", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let dims: Vec<(u64, u64)> = v["kernel_dimensions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| (d["order"].as_u64().unwrap(), d["dim"].as_u64().unwrap()))
        .collect();
    assert_eq!(dims, vec![(3, 6), (4, 6), (5, 6)]);
    assert!(v["family"].is_null());
}

#[test]
fn classify_gauged_darboux_recovers_darboux() {
    let dir = TempDir::new().unwrap();
    let g = GaugeTransformation::identity()
        .with_point_term(Face::new(1, 2), 3, frac(2, 3))
        .with_point_term(Face::new(3, 4), 4, int(-5));
    let fam = conjugate(&expand_darboux(6), &g).unwrap();
    let file = write(&dir, "gauged.json", &fam.to_json());
    let out = latmap(&["classify", "--order", "4", "--json", &file]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let f = &stdout_json(&out)["family"];
    assert_eq!(f["branch"], "branch_i");
    assert_eq!(f["darboux_equivalent"], true);
    assert_eq!(f["consistent"], true);
    assert!(f["gauge"].is_object());
}

fn univariate_family(order: u32, tamper: bool) -> MapFamily {
    let mut fam = MapFamily::identity(4, order);
    for (n, f) in enumerate_faces(4).into_iter().enumerate() {
        for d in (1..=4).filter(|&d| !f.contains(d)) {
            let lambda = int(n as i64 + i64::from(d));
            for m in 2..=order {
                let c = num_traits::pow(lambda.clone(), m as usize - 1);
                fam.set_part(f, d, m, Polynomial::term(c, Monomial::power(f.var(), m))).unwrap();
            }
        }
    }
    if tamper {
        let f = Face::new(1, 2);
        fam.add_to_part(f, 3, 3, Polynomial::term(int(1), Monomial::power(f.var(), 3))).unwrap();
    }
    fam
}

#[test]
fn classify_branch_two_families() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.json", &univariate_family(6, false).to_json());
    let out = latmap(&["classify", "--order", "3", "--json", &good]);
    assert_eq!(code(&out), 0);
    let f = &stdout_json(&out)["family"];
    assert_eq!(f["branch"], "branch_ii");
    assert_eq!(f["commuting"], true);
    assert_eq!(f["consistent"], true);

    let bad = write(&dir, "bad.json", &univariate_family(6, true).to_json());
    let out = latmap(&["classify", "--order", "3", "--json", &bad]);
    assert_eq!(code(&out), 1);
    let f = &stdout_json(&out)["family"];
    assert_eq!(f["branch"], "branch_ii");
    assert_eq!(f["commuting"], false);
    assert_eq!(f["consistent"], false);
}

#[test]
fn kernel_reports_each_order() {
    let out = latmap(&["kernel", "--order", "5", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let orders = v["orders"].as_array().unwrap();
    assert_eq!(orders.len(), 3);
    let dir = TempDir::new().unwrap();
    let trunc = write(&dir, "d3.json", &expand_darboux(3).to_json());
    let out = latmap(&["kernel", "--order", "5", "--json", &trunc]);
    assert_eq!(code(&out), 1);
    let orders = stdout_json(&out)["orders"].as_array().unwrap().clone();
    assert_eq!(orders.len(), 3);
    assert_eq!(orders[1]["kernel"].as_array().unwrap().len(), 6);
    assert_eq!(orders[2]["target"], 5);
    assert!(orders[2]["inconsistent_row"].is_string());
}

#[test]
fn gauge_apply_round_trip() {
    let dir = TempDir::new().unwrap();
    let base = write(&dir, "d.json", &expand_darboux(5).to_json());
    let g = GaugeTransformation::identity()
        .with_scaling(Face::new(1, 3), frac(3, 2))
        .with_point_term(Face::new(2, 4), 2, int(4));
    let gfile = write(&dir, "g.json", &g.to_json());
    let ifile = write(&dir, "inv.json", &g.inverse(5).unwrap().to_json());
    let mid = dir.path().join("mid.json");
    let back = dir.path().join("back.json");
    assert_eq!(code(&latmap(&["gauge-apply", &base, "--gauge", &gfile, "--output", s(&mid)])), 0);
    let mid_text = std::fs::read_to_string(&mid).unwrap();
    assert_ne!(MapFamily::from_json(&mid_text).unwrap(), expand_darboux(5));
    assert_eq!(code(&latmap(&["gauge-apply", s(&mid), "--gauge", &ifile, "--output", s(&back)])), 0);
    let back = MapFamily::from_json(&std::fs::read_to_string(&back).unwrap()).unwrap();
    assert_eq!(back, expand_darboux(5));
    let bad = write(&dir, "badg.json", "{\"scalings\":{\"12\":\"0\"}}");
    assert_eq!(code(&latmap(&["gauge-apply", &base, "--gauge", &bad])), 2);
}

#[test]
fn numeric_star_triangle_exact() {
    let out = latmap(&["numeric-check", "--map", "star-triangle", "--mode", "exact", "--trials", "100", "--seed", "7", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["exact_zero"], 100);
    assert_eq!(v["pass"], true);
}

#[test]
fn numeric_darboux_float() {
    let out = latmap(&["numeric-check", "--map", "darboux", "--trials", "1000", "--seed", "7", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn numeric_zero_state_has_zero_residual() {
    for (map, mode) in [("darboux", "float"), ("darboux", "exact")] {
        let out = latmap(&["numeric-check", "--map", map, "--mode", mode, "--trials", "1", "--zero-state", "--json"]);
        let v = stdout_json(&out);
        assert_eq!(code(&out), 0, "{map} {mode}");
        match mode {
            "float" => assert_eq!(v["max_residual"].as_f64(), Some(0.0)),
            _ => assert_eq!(v["exact_zero"], 1),
        }
    }
    let out = latmap(&["numeric-check", "--map", "star-triangle", "--trials", "1", "--zero-state"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside the domain"));
}

#[test]
fn numeric_reports_are_deterministic() {
    let args = ["numeric-check", "--map", "star-triangle", "--trials", "200", "--seed", "3", "--json"];
    assert_eq!(latmap(&args).stdout, latmap(&args).stdout);
}
