use std::fs;

use hria_core::fixtures::{hello_barbie_initial, hello_barbie_mitigated};
use hria_core::persistence::{
    self, checksum, from_file_str, load, load_assessment, save, to_file_string, CURRENT_SCHEMA_VERSION,
};
use hria_core::workflow::integrate;
use hria_core::{Catalog, Document, PersistenceError, RightEntry};
use serde_json::Value;

const V1: &str = include_str!("data/doll.v1.hria.json");
const V2: &str = include_str!("data/doll.v2.hria.json");
const FIXTURE_INITIAL: &str = include_str!("../fixtures/hello-barbie-initial.hria.json");
const FIXTURE_MITIGATED: &str = include_str!("../fixtures/hello-barbie.hria.json");

#[test]
fn checked_in_fixtures_match_the_builders() {
    assert_eq!(to_file_string(&Document::Assessment(hello_barbie_initial())), FIXTURE_INITIAL);
    assert_eq!(to_file_string(&Document::Assessment(hello_barbie_mitigated())), FIXTURE_MITIGATED);
}

#[test]
fn save_load_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("case.hria.json");
    let doc = Document::Assessment(hello_barbie_mitigated());
    save(&doc, &path).unwrap();
    let first = fs::read(&path).unwrap();
    let loaded = load(&path).unwrap();
    assert_eq!(loaded, doc);
    save(&loaded, &path).unwrap();
    assert_eq!(fs::read(&path).unwrap(), first);
    // No stray temporary files.
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn canonical_text_shape() {
    let text = to_file_string(&Document::Assessment(hello_barbie_initial()));
    assert!(text.ends_with("}\n"));
    assert!(!text.contains('\r'));
    assert!(text.contains("\n  \"kind\": \"assessment\""));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema_version"], CURRENT_SCHEMA_VERSION);
    assert_eq!(v["checksum"].as_str().unwrap(), checksum(&v["payload"]));
}

#[test]
fn tampered_payload_is_rejected() {
    let tampered = FIXTURE_MITIGATED.replacen("\"probability\": \"low\"", "\"probability\": \"high\"", 1);
    assert_ne!(tampered, FIXTURE_MITIGATED);
    assert!(matches!(from_file_str(&tampered), Err(PersistenceError::ChecksumMismatch { .. })));
}

fn reseal(mut v: Value) -> String {
    let sum = checksum(&v["payload"]);
    v["checksum"] = Value::String(sum);
    serde_json::to_string(&v).unwrap()
}

#[test]
fn unknown_schema_and_kind_are_rejected() {
    let mut v: Value = serde_json::from_str(FIXTURE_INITIAL).unwrap();
    v["schema_version"] = 99.into();
    assert!(matches!(from_file_str(&reseal(v.clone())), Err(PersistenceError::UnknownSchema(99))));
    v["schema_version"] = 2.into();
    v["kind"] = "spreadsheet".into();
    assert!(matches!(from_file_str(&reseal(v)), Err(PersistenceError::UnknownKind(k)) if k == "spreadsheet"));
}

#[test]
fn v1_migrates_to_golden_v2() {
    let doc = from_file_str(V1).unwrap();
    assert_eq!(to_file_string(&doc), V2);
    // Re-saving writes the current version.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("doll.hria.json");
    fs::write(&path, V1).unwrap();
    let a = load_assessment(&path).unwrap();
    save(&Document::Assessment(a), &path).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), V2);
}

#[test]
fn v1_with_bad_ordinal_names_the_field() {
    let mut v: Value = serde_json::from_str(V1).unwrap();
    v["payload"]["risks"][0]["initial"]["gravity"] = 7.into();
    match from_file_str(&reseal(v)) {
        Err(PersistenceError::InvariantViolation(iv)) => assert_eq!(iv.path, "risks[0].initial.gravity"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn round_referencing_missing_risk_names_it() {
    let mut v: Value = serde_json::from_str(FIXTURE_MITIGATED).unwrap();
    v["payload"]["rounds"][1]["risk_id"] = "ghost".into();
    match from_file_str(&reseal(v)) {
        Err(PersistenceError::InvariantViolation(iv)) => {
            assert_eq!(iv.path, "rounds[1].risk_id");
            assert!(iv.message.contains("ghost"), "{}", iv.message);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn structural_invariants_checked_on_load() {
    // Open precautionary flag is not allowed once finalized; here: unknown right.
    let mut v: Value = serde_json::from_str(FIXTURE_INITIAL).unwrap();
    v["payload"]["risks"][0]["right_key"] = "no-such-right".into();
    match from_file_str(&reseal(v)) {
        Err(PersistenceError::InvariantViolation(iv)) => assert_eq!(iv.path, "risks[0].right_key"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unwritable_path_is_an_io_error() {
    let doc = Document::Assessment(hello_barbie_initial());
    let err = save(&doc, "/nonexistent-dir/x/case.hria.json").unwrap_err();
    assert!(matches!(err, PersistenceError::Io { .. }));
    assert!(matches!(load("/nonexistent-dir/case.hria.json"), Err(PersistenceError::Io { .. })));
}

#[test]
fn catalog_and_integrated_documents_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = Catalog::builtin()
        .register(RightEntry::custom("child-safety", "Child safety", "Physical safety of children."))
        .unwrap();
    let path = dir.path().join("catalog.hria.json");
    save(&Document::Catalog(catalog.clone()), &path).unwrap();
    assert_eq!(persistence::load_catalog(&path).unwrap(), catalog);

    let a = hello_barbie_mitigated();
    let shared = hria_core::workflow::shared_catalog(&catalog, &[&a]).unwrap();
    let integrated = integrate(&[&a], &shared, Some(2)).unwrap();
    let path = dir.path().join("city.hria.json");
    save(&Document::Integrated(integrated.clone()), &path).unwrap();
    assert_eq!(persistence::load_integrated(&path).unwrap(), integrated);
    assert!(matches!(load_assessment(&path), Err(PersistenceError::WrongKind { .. })));
}

#[test]
fn modified_builtin_catalog_entry_is_rejected() {
    let text = to_file_string(&Document::Catalog(Catalog::builtin()));
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["payload"]["entries"][0]["title"] = "Something else".into();
    assert!(matches!(from_file_str(&reseal(v)), Err(PersistenceError::InvariantViolation(_))));
}

#[test]
fn file_ids() {
    use std::path::Path;
    assert_eq!(persistence::file_id(Path::new("/x/hello-barbie.hria.json")), Some("hello-barbie"));
    assert_eq!(persistence::file_id(Path::new("/x/notes.json")), None);
}
