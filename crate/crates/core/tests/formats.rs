mod common;

use zerosum::abelian::{Elem, Group, GroupElem};
use zerosum::labelling::{lower_bound_labelling, random_edge_labelling, random_labelling, ArcLabelling, EdgeLabelling};
use zerosum::minors::{random_minor_model, ModelFile, ModelShape};
use zerosum::oracle::{find_zero_sum_cycle_exhaustive, WitnessFile, WitnessKind};
use zerosum::ramsey::{parse_model, sat_export, sat_import_verify, solve_cnf, SatOptions, SatOutcome};
use zerosum::solver::{solve_general, ReportFile};

#[test]
fn labelling_round_trips() {
    for spec in ["Z2", "Z6", "Z2xZ4"] {
        let g = Group::from_spec(&spec.parse().unwrap()).unwrap();
        let w = random_labelling(&g, 5, 3).unwrap();
        assert_eq!(ArcLabelling::from_json(&w.to_json().unwrap()).unwrap(), w);
        let e = random_edge_labelling(&g, 5, 3).unwrap();
        assert_eq!(EdgeLabelling::from_json(&e.to_json().unwrap()).unwrap(), e);
    }
}

#[test]
fn labelling_file_shape() {
    let text = lower_bound_labelling(3).unwrap().to_json().unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["group"], "Z3");
    assert_eq!(doc["n"], 3);
    assert_eq!(doc["arcs"].as_array().unwrap().len(), 6);
    assert!(ArcLabelling::from_json(r#"{"group":"Z3","n":2,"arcs":[[0,1,[1]]]}"#).is_err());
    assert!(ArcLabelling::from_json(r#"{"group":"Z3","n":2,"arcs":[[0,1,[1]],[1,0,[3]]]}"#).is_err());
}

#[test]
fn witness_and_report_files_verify() {
    let g = Group::cyclic(4).unwrap();
    let w = random_labelling(&g, 32, 17).unwrap();
    let report = solve_general(&w).unwrap();
    let file = report.to_file(&w).unwrap();
    let text = serde_json::to_string(&file).unwrap();
    let back: ReportFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back.witness.kind, WitnessKind::Cycle);
    assert!(back.witness.verify(&w).unwrap().is_zero());
    assert_eq!(common::cycle_sum(&w, &back.witness.vertices), Some(Elem::ZERO));

    let small = random_labelling(&g, 6, 1).unwrap();
    if let Some(c) = find_zero_sum_cycle_exhaustive(&small, 2).unwrap() {
        let mut wf = WitnessFile::cycle(&small, &c).unwrap();
        assert!(wf.verify(&small).is_ok());
        wf.sum = GroupElem(vec![1]);
        assert!(wf.verify(&small).is_err());
    }
}

#[test]
fn external_solver_model_is_accepted() {
    // a model as an external solver would print it, several `v` lines
    let spec = "Z3".parse().unwrap();
    let inst = sat_export(&spec, 3, SatOptions::default()).unwrap();
    let SatOutcome::Sat(model) = solve_cnf(inst.num_vars, &inst.clauses, u64::MAX).unwrap() else {
        panic!("K_3 over Z3 has a zero-sum-free labelling");
    };
    let mut text = String::from("c solver output\ns SATISFIABLE\n");
    for chunk in model.chunks(10) {
        text.push('v');
        for lit in chunk {
            text.push_str(&format!(" {lit}"));
        }
        text.push('\n');
    }
    text.push_str("v 0\n");
    let parsed = parse_model(&text).unwrap();
    assert_eq!(parsed, model);
    let w = sat_import_verify(&parsed, &spec, 3).unwrap();
    assert!(!common::has_zero_sum_cycle(&w, 2));
}

#[test]
fn minor_model_file_shape() {
    let (g, model) = random_minor_model(3, ModelShape::Singletons, 2).unwrap();
    let text = ModelFile::new(&g, &model).to_json().unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["host"]["n"], 6);
    assert_eq!(doc["pairs"].as_array().unwrap().len(), 3);
    assert!(doc["pairs"][0]["plus"].is_array() && doc["pairs"][0]["minus"].is_array());
    let (g2, m2) = ModelFile::from_json(&text).unwrap().parse().unwrap();
    assert_eq!((g2, m2), (g, model));
}
