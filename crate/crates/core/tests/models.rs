use std::fs;

use ahodge::algebra::{Form, Scalar};
use ahodge::calculus::{apply_d, del, delbar, mu, mubar, star};
use ahodge::model::{builtin, load_model, load_model_str, rat, to_document, validate, BuiltinName, Model, ValidateOptions};
use ahodge::Error;

fn kt(num: i64, den: i64) -> Model {
    builtin(BuiltinName::Kt, &rat(num, den)).unwrap()
}

#[test]
fn kt_structure_equations() {
    // dφ² = 2δ(φ^{12} + φ^{12̄} + φ^{21̄} − φ^{1̄2̄}) in π-units, i.e. b/4 with b = 8πδ
    for (num, den) in [(1, 1), (1, 2), (5, 1)] {
        let m = kt(num, den);
        let two_delta = Scalar::ratio(2 * num, den);
        let want = m.gen(&[1, 2], &[]).add(&m.gen(&[1], &[2])).add(&m.gen(&[2], &[1])).sub(&m.gen(&[], &[1, 2])).scale(&two_delta);
        assert_eq!(apply_d(&m, &m.gen(&[2], &[])), want);
        assert!(apply_d(&m, &m.gen(&[1], &[])).is_zero());
        assert!(apply_d(&m, m.omega()).is_zero());
    }
}

#[test]
fn kt_components_of_dphi2() {
    let m = kt(1, 1);
    let p2 = m.gen(&[2], &[]);
    assert_eq!(mu(&m, &p2), Form::zero(2));
    assert_eq!(del(&m, &p2), m.gen(&[1, 2], &[]).scale(&Scalar::from_int(2)));
    assert_eq!(delbar(&m, &p2), m.gen(&[1], &[2]).add(&m.gen(&[2], &[1])).scale(&Scalar::from_int(2)));
    assert_eq!(mubar(&m, &p2), m.gen(&[], &[1, 2]).scale(&Scalar::from_int(-2)));
}

#[test]
fn kt_rejects_zero_delta() {
    assert!(matches!(builtin(BuiltinName::Kt, &rat(0, 1)), Err(Error::InvalidArgument(_))));
}

#[test]
fn star_examples() {
    let m = kt(1, 1);
    assert_eq!(star(&m, &m.constant(Scalar::one())), *m.volume());
    assert_eq!(star(&m, m.omega()), *m.omega());
    assert_eq!(star(&m, &m.gen(&[1], &[2])), m.gen(&[1], &[2]).neg());
    assert_eq!(star(&m, &m.gen(&[1], &[1])), m.gen(&[2], &[2]));
}

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    for name in [BuiltinName::Kt, BuiltinName::Hyperelliptic, BuiltinName::Torus4] {
        let m = builtin(name, &rat(3, 7)).unwrap();
        let path = dir.path().join(format!("{}.json", name.as_str()));
        fs::write(&path, serde_json::to_string_pretty(&to_document(&m)).unwrap()).unwrap();
        let back = load_model(&path).unwrap();
        assert_eq!(back, m);
        assert!(validate(&back, &ValidateOptions { samples: 10, ..Default::default() }).passed());
    }
}

#[test]
fn corrupted_file_fails_validation_with_witness() {
    let mut doc = to_document(&kt(1, 1));
    // φ^{12} coefficient of dφ²: 2δ becomes 3δ
    let terms = doc["structure"][1]["terms"].as_array_mut().unwrap();
    let slot = terms.iter_mut().find(|t| t["basis"] == serde_json::json!([[1, 2], []])).expect("φ^{12} term");
    slot["coeff"]["cdelta"] = serde_json::json!("3");
    let m = load_model_str(&doc.to_string()).unwrap();
    let r = validate(&m, &ValidateOptions { samples: 10, ..Default::default() });
    let d2 = r.check("d_squared").unwrap();
    assert!(!d2.passed);
    assert!(d2.witness.is_some());
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_model(&dir.path().join("absent.json")), Err(Error::Io(_))));
}

#[test]
fn malformed_documents_name_the_field() {
    let bad = [
        (r#"{"name": "x"}"#, "n"),
        ("not json", ""),
    ];
    for (text, path) in bad {
        match load_model_str(text) {
            Err(Error::Parse(p)) => assert!(p.path.starts_with(path), "{text}: {}", p.path),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn scaled_metric_scales_star_and_omega() {
    let m = kt(1, 1);
    let s = m.scaled_metric(&rat(2, 1)).unwrap();
    assert_eq!(*s.omega(), m.omega().scale(&Scalar::from_int(2)));
    assert_eq!(*s.volume(), m.volume().scale(&Scalar::from_int(4)));
    assert_eq!(star(&s, &m.constant(Scalar::one())), m.volume().scale(&Scalar::from_int(4)));
    assert_eq!(star(&s, &m.gen(&[1], &[1])), star(&m, &m.gen(&[1], &[1])));
    assert!(m.scaled_metric(&rat(0, 1)).is_err());
}
