use std::path::Path;
use std::process::{Command, Output};

use qsys_k0::json::{self, FusionTableDoc, InvariantDoc, QSystemsDoc, VerdictDoc};
use serde_json::Value;

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsys-k0")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn compare(a: &str, b: &str) -> (VerdictDoc, i32) {
    let o = run(&["--format", "json", "compare", &data(a), &data(b)]);
    (json::from_str(&stdout(&o)).unwrap(), o.status.code().unwrap())
}

#[test]
fn verdict_exit_codes() {
    let (v, code) = compare("diagrams/f.json", "diagrams/g.json");
    assert_eq!(code, 0);
    assert_eq!(
        serde_json::to_string(&v).unwrap(),
        r#"{"verdict":"equivalent","witness":{"Q1":"1","Q2":"1/2","Q3":"1/2"}}"#
    );

    let (v, code) = compare("diagrams/f.json", "diagrams/f.json");
    assert_eq!(code, 0);
    let VerdictDoc::Equivalent { witness } = v else { panic!() };
    assert!(witness.values().all(|u| u == "1"));

    let (v, code) = compare("diagrams/e.json", "diagrams/f.json");
    assert_eq!(code, 3);
    let VerdictDoc::Inequivalent { certificate } = v else { panic!() };
    assert_eq!((certificate.object.as_str(), certificate.kind.as_str()), ("Q2", "rank"));
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(run(&["compare", &data("diagrams/f.json"), "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(run(&["fusion-table", &data("diagrams/f.json")]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--max-group-order", "2", "fusion-table", &data("groups/z4.json")]).status.code(), Some(1));
    let o = run(&["bimodules", &data("groups/z4.json"), "--source", "Q9", "--target", "Q1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn trivial_group() {
    let o = run(&["--format", "json", "fusion-table", &data("groups/trivial.json")]);
    let doc: FusionTableDoc = json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc.simples.len(), 1);
    assert_eq!(doc.products.len(), 1);

    let o = run(&["--format", "json", "oracle", &data("groups/trivial.json")]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(o.status.code(), Some(0));

    let o = run(&["--format", "json", "invariant", &data("diagrams/trivial.json")]);
    let inv: InvariantDoc = json::from_str(&stdout(&o)).unwrap();
    assert!(inv.morphisms.iter().all(|m| m.multiplier.as_deref() == Some("1")));
}

#[test]
fn oracle_reports() {
    for (g, rows) in [("z4", 9), ("z12", 36)] {
        let o = run(&["oracle", &data(&format!("groups/{g}.json"))]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        assert_eq!(text.matches("PASS").count(), rows);
        assert!(!text.contains("FAIL"));
    }
}

#[test]
fn float_verified_table() {
    let o = run(&["fusion-table", "--verify", &data("groups/z6.json")]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn json_round_trips() {
    let text = stdout(&run(&["--format", "json", "fusion-table", &data("groups/z4.json")]));
    let doc: FusionTableDoc = json::from_str(&text).unwrap();
    assert_eq!(json::to_string(&doc).unwrap(), text);

    let text = stdout(&run(&["--format", "json", "invariant", &data("diagrams/g.json")]));
    let doc: InvariantDoc = json::from_str(&text).unwrap();
    assert_eq!(json::to_string(&doc).unwrap(), text);

    let text = stdout(&run(&["--format", "json", "qsystems", &data("groups/klein.json")]));
    let doc: QSystemsDoc = json::from_str(&text).unwrap();
    assert_eq!(json::to_string(&doc).unwrap(), text);
    assert!(doc.warning.is_some());
}

#[test]
fn deterministic_output() {
    for args in [
        vec!["fusion-table", "groups/z6.json"],
        vec!["--format", "json", "invariant", "diagrams/f.json"],
        vec!["--parallel", "--format", "json", "fusion-table", "groups/z8.json"],
    ] {
        let args: Vec<String> = args.iter().map(|a| if a.ends_with(".json") { data(a) } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
    let serial = run(&["--format", "json", "fusion-table", &data("groups/z8.json")]).stdout;
    let parallel = run(&["--parallel", "--format", "json", "fusion-table", &data("groups/z8.json")]).stdout;
    assert_eq!(serial, parallel);
}

#[test]
fn text_agrees_with_json() {
    let text = stdout(&run(&["invariant", &data("diagrams/f.json")]));
    let doc: InvariantDoc =
        json::from_str(&stdout(&run(&["--format", "json", "invariant", &data("diagrams/f.json")]))).unwrap();
    for m in &doc.morphisms {
        let line = text.lines().find(|l| l.split_whitespace().next() == Some(m.label.as_str())).unwrap();
        assert_eq!(line.split_whitespace().last(), m.multiplier.as_deref());
    }
}

#[test]
fn heterogeneous_diagram() {
    let o = run(&["--format", "json", "invariant", &data("diagrams/q2_into_f.json")]);
    assert_eq!(o.status.code(), Some(0));
    let doc: InvariantDoc = json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc.objects.len(), 3);
}

#[test]
fn k0_and_shift_equivalence() {
    let o = run(&["--format", "json", "k0", "--matrix", &data("matrices/g_q1.json"), "--against", &data("matrices/four.json")]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k0"]["display"], "Z[1/4]");
    assert_eq!(v["limit_rank"], 1);
    assert!(v["shift_equivalence"].is_object());

    let o = run(&["--format", "json", "k0", "--matrix", &data("matrices/e_q2.json")]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k0"]["display"], "Z[1/4]^2");

    let o = run(&["--format", "json", "k0", "--matrix", &data("matrices/fibonacci.json")]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k0"]["variant"], "opaque");
}

#[test]
fn crossed_product_and_bimodules() {
    let o = run(&["--format", "json", "crossed-product", &data("groups/z4.json"), "--acting", "Q2", "--base", "Q1"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rank"], 2);
    assert!(v["blocks"].as_array().unwrap().iter().all(|b| b["size"] == 2));

    let o = run(&["--format", "json", "bimodules", &data("groups/z4.json"), "--source", "[[2]]", "--target", "3"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let labels: Vec<&str> = v.as_array().unwrap().iter().map(|b| b["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["M_{2-3}^triv", "M_{2-3}^sign"]);
}
