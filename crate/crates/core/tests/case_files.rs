use enriques_core::cases::{
    bundled_case, bundled_cases, list_cases, load_case, save_case, validate_case, CaseError,
    CASE_ORDER,
};
use enriques_core::CaseRecord;
use serde_json::Value;

fn bundled_json(id: &str) -> Value {
    serde_json::from_str(&bundled_case(id).unwrap().to_json()).unwrap()
}

fn parse(v: &Value) -> Result<CaseRecord, CaseError> {
    CaseRecord::from_json(&v.to_string(), "test")
}

fn failed_checks(v: &Value) -> Vec<String> {
    validate_case(&parse(v).unwrap())
        .failures()
        .map(|i| i.check.clone())
        .collect()
}

#[test]
fn every_bundled_case_validates() {
    for case in bundled_cases() {
        let r = validate_case(&case);
        let bad: Vec<_> = r
            .failures()
            .map(|i| format!("{}: {}", i.check, i.detail))
            .collect();
        assert!(bad.is_empty(), "{}: {bad:?}", case.case_id);
    }
}

#[test]
fn bundled_ids_follow_classification_order() {
    let ids: Vec<String> = bundled_cases().into_iter().map(|c| c.case_id).collect();
    assert_eq!(ids, CASE_ORDER);
}

#[test]
fn json_round_trip_is_lossless() {
    for case in bundled_cases() {
        let text = case.to_json();
        let back = CaseRecord::from_json(&text, "round trip").unwrap();
        assert_eq!(back, case);
        assert_eq!(back.to_json(), text);
    }
}

#[test]
fn save_then_load() {
    let dir = tempfile::tempdir().unwrap();
    let case = bundled_case("56-0").unwrap();
    let path = dir.path().join("56-0.json");
    save_case(&case, &path).unwrap();
    assert_eq!(load_case(&path).unwrap(), case);
}

#[test]
fn list_cases_sorts_by_classification_order() {
    let dir = tempfile::tempdir().unwrap();
    assert!(list_cases(dir.path()).unwrap().is_empty());
    for id in ["56-0", "6-2-ell"] {
        save_case(
            &bundled_case(id).unwrap(),
            &dir.path().join(format!("{id}.json")),
        )
        .unwrap();
    }
    std::fs::write(dir.path().join("readme.txt"), "not a case").unwrap();
    assert_eq!(list_cases(dir.path()).unwrap(), ["6-2-ell", "56-0"]);
}

#[test]
fn short_ids_resolve_when_unique() {
    assert_eq!(bundled_case("54").unwrap().case_id, "54-ell");
    assert_eq!(bundled_case("56").unwrap().case_id, "56-0");
    assert!(matches!(bundled_case("51"), Err(CaseError::UnknownCase(_))));
    assert!(matches!(
        bundled_case("57-0"),
        Err(CaseError::UnknownCase(_))
    ));
}

#[test]
fn unknown_field_names_its_path() {
    let mut v = bundled_json("9-1-ell");
    v["expected"]["extra"] = Value::from(1);
    match parse(&v) {
        Err(CaseError::Parse { field, .. }) => assert_eq!(field, "expected.extra"),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn malformed_rational_is_rejected() {
    let mut v = bundled_json("9-1-ell");
    v["expected"]["a"] = Value::from("9/0");
    match parse(&v) {
        Err(CaseError::Parse { field, .. }) => assert_eq!(field, "expected.a"),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn schema_version_is_checked() {
    let mut v = bundled_json("9-1-ell");
    v["schema"] = Value::from(2);
    assert!(matches!(
        parse(&v),
        Err(CaseError::SchemaVersion { found: 2, .. })
    ));
}

#[test]
fn duplicate_vertex_id_is_rejected() {
    let mut v = bundled_json("9-1-ell");
    let first = v["vertices"][1].clone();
    v["vertices"].as_array_mut().unwrap().push(first);
    let err = parse(&v).unwrap_err().to_string();
    assert!(err.contains("duplicate"), "{err}");
}

#[test]
fn edge_to_unknown_vertex_is_rejected() {
    let mut v = bundled_json("9-1-ell");
    v["edges"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!(["c", "nowhere"]));
    let err = parse(&v).unwrap_err().to_string();
    assert!(err.contains("nowhere"), "{err}");
}

#[test]
fn unknown_formula_label_is_flagged() {
    let mut v = bundled_json("9-1-ell");
    v["formula"]["clauses"][0]["body"] = Value::from("member(12,T2)");
    assert!(failed_checks(&v).contains(&"formula labels".to_string()));
}

#[test]
fn mistyped_weight_is_flagged() {
    let mut v = bundled_json("6-2-ell");
    let vs = v["vertices"].as_array_mut().unwrap();
    let k = vs
        .iter()
        .position(|x| x["kind"] == "exceptional" && x["weight"] == -3)
        .expect("6-2 has a (-3)-curve");
    vs[k]["weight"] = Value::from(-2);
    let bad = failed_checks(&v);
    assert!(bad.contains(&"a".to_string()), "{bad:?}");
}

#[test]
fn missing_edge_is_flagged() {
    let mut v = bundled_json("8-1-ell");
    v["edges"].as_array_mut().unwrap().remove(0);
    assert!(!failed_checks(&v).is_empty());
}

#[test]
fn candidate_weight_is_checked() {
    let mut v = bundled_json("56-0");
    let vs = v["vertices"].as_array_mut().unwrap();
    let k = vs.iter().position(|x| x["kind"] == "candidate").unwrap();
    vs[k]["weight"] = Value::from(-2);
    assert!(failed_checks(&v).contains(&"candidate weights".to_string()));
}
