use ahodge::algebra::{Form, ModeIndex};
use ahodge::calculus::{apply_d, gauduchon_defect, star};
use ahodge::model::{builtin, rat, BuiltinName, Model};
use ahodge::solver::{
    b_minus, compare, deck_project, mode_classes, solve_harmonic, system_residual, Certification, FormSpace, Relation,
    SolveReport, SystemKind,
};
use ahodge::Error;

fn kt(num: i64, den: i64) -> Model {
    builtin(BuiltinName::Kt, &rat(num, den)).unwrap()
}

fn hyper() -> Model {
    builtin(BuiltinName::Hyperelliptic, &rat(0, 1)).unwrap()
}

fn torus() -> Model {
    builtin(BuiltinName::Torus4, &rat(0, 1)).unwrap()
}

fn solve(m: &Model, p: usize, q: usize, system: SystemKind, box_radius: u32) -> SolveReport {
    solve_harmonic(m, FormSpace::Bidegree(p, q), system, box_radius, None).unwrap()
}

fn assert_report_invariants(m: &Model, r: &SolveReport) {
    for f in &r.basis {
        assert!(system_residual(m, r.system, f).is_empty(), "{} {}: residual on {f}", m.name(), r.system);
        assert!(f.modes().iter().all(|k| k.sup_norm() <= r.box_radius), "{f} leaves the box");
    }
    if !m.decks().is_empty() {
        assert_eq!(deck_project(m, &r.basis), r.basis, "deck projection moved the basis");
    }
}

#[test]
fn mode_class_examples() {
    let c = mode_classes(&kt(1, 1), SystemKind::Bc, 3, 0).unwrap();
    assert_eq!(c.len(), 343);
    assert!(c.iter().all(|c| c.modes.len() == 1));
    let c = mode_classes(&torus(), SystemKind::Bc, 1, 0).unwrap();
    assert!(c.iter().all(|c| c.modes.len() == 1));

    let c = mode_classes(&hyper(), SystemKind::Bc, 2, 2).unwrap();
    assert_eq!(c.len(), 125);
    for class in &c {
        let first = class.modes[0];
        assert_eq!(class.modes.len(), 5);
        assert!(class.modes.iter().all(|k| (0..4).all(|i| i == 2 || k.get(i) == first.get(i))));
    }
    match mode_classes(&hyper(), SystemKind::Bc, 2, 1) {
        Err(Error::MarginTooSmall { given: 1, required: 2 }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn reports_satisfy_their_systems() {
    let cases = [
        (kt(1, 1), 3),
        (kt(1, 2), 3),
        (hyper(), 2),
        (torus(), 1),
    ];
    for (m, b) in &cases {
        for p in 0..=2 {
            for q in 0..=2 {
                for system in [SystemKind::Bc, SystemKind::Delbar, SystemKind::Aeppli] {
                    assert_report_invariants(m, &solve(m, p, q, system, *b));
                }
            }
        }
        assert_report_invariants(m, &b_minus(m, *b).unwrap());
    }
}

#[test]
fn star_sends_bc_to_aeppli() {
    for (m, b) in [(kt(1, 1), 3), (hyper(), 2)] {
        for p in 0..=2 {
            for q in 0..=2 {
                let bc = solve(&m, p, q, SystemKind::Bc, b);
                for f in &bc.basis {
                    assert!(system_residual(&m, SystemKind::Aeppli, &star(&m, f)).is_empty(), "({p},{q}) {f}");
                }
            }
        }
    }
}

#[test]
fn dimension_is_monotone_in_the_box() {
    let m = kt(1, 1);
    let dims: Vec<usize> = (1..=5).map(|b| solve(&m, 1, 2, SystemKind::Bc, b).dimension).collect();
    assert!(dims.windows(2).all(|w| w[0] <= w[1]), "{dims:?}");
    // every lattice point on the circle lies within sup-norm 2
    let r5 = solve(&m, 1, 2, SystemKind::Bc, 5);
    assert_eq!(r5.certification, Certification::ExactDecoupled);
    assert_eq!(r5.support_radius, Some(2));
    assert_eq!(solve(&m, 1, 2, SystemKind::Bc, 6).basis, r5.basis);

    let h = hyper();
    let d1 = solve_harmonic(&h, FormSpace::Bidegree(1, 1), SystemKind::Bc, 1, None).unwrap();
    let d3 = solve_harmonic(&h, FormSpace::Bidegree(1, 1), SystemKind::Bc, 3, None).unwrap();
    assert!(d1.dimension <= d3.dimension);
    assert_eq!(d3.certification, Certification::BoxLowerBound);
}

#[test]
fn h11_bc_is_b_minus_or_one_more() {
    for (m, b) in [(kt(1, 1), 3), (kt(5, 1), 3), (hyper(), 2), (torus(), 1)] {
        let h11 = solve(&m, 1, 1, SystemKind::Bc, b).dimension;
        let bm = b_minus(&m, b).unwrap().dimension;
        assert!(h11 == bm || h11 == bm + 1, "{}: h11 {h11} b⁻ {bm}", m.name());
    }
}

#[test]
fn gauduchon_models_have_asd_hodge_11() {
    let m = hyper();
    assert!(gauduchon_defect(&m).unwrap().is_zero());
    assert!(!apply_d(&m, m.omega()).is_zero());
    let hodge = solve(&m, 1, 1, SystemKind::Hodge, 2);
    assert!(!hodge.basis.is_empty());
    for f in &hodge.basis {
        assert_eq!(star(&m, f), f.neg(), "{f} is not anti-self-dual");
    }
}

#[test]
fn compare_examples() {
    let cmp = compare(&kt(1, 1), FormSpace::Bidegree(2, 2), SystemKind::Bc, SystemKind::Delbar, 3, None).unwrap();
    assert_eq!(cmp.relation, Relation::Equal);
    assert!(cmp.witness.is_none());
    assert_eq!(cmp.to_string(), "bc = delbar");
    let cmp = compare(&torus(), FormSpace::Bidegree(1, 1), SystemKind::Bc, SystemKind::Delbar, 1, None).unwrap();
    assert_eq!(cmp.relation, Relation::Equal);
    let cmp = compare(&kt(1, 1), FormSpace::Bidegree(1, 2), SystemKind::Delbar, SystemKind::Bc, 3, None).unwrap();
    assert_eq!(cmp.relation, Relation::FirstInSecond);
    assert_eq!(cmp.to_string(), "delbar ⊊ bc");
}

#[test]
fn kt_20_sector_carries_a_character() {
    // the constant φ^{12} is not ∂̄-closed; the sector solution is χ_{(0,−2,0)}φ^{12} at δ = 1
    let m = kt(1, 1);
    assert!(!system_residual(&m, SystemKind::Delbar, &m.gen(&[1, 2], &[])).is_empty());
    let r = solve(&m, 2, 0, SystemKind::Delbar, 3);
    let want = m.character(&[0, -2, 0]).wedge(&m.gen(&[1, 2], &[]));
    assert_eq!(r.basis, vec![want]);
}

#[test]
fn json_report_is_deterministic() {
    let m = kt(1, 1);
    let a = solve(&m, 1, 1, SystemKind::Bc, 3).to_json(false);
    let b = solve(&m, 1, 1, SystemKind::Bc, 3).to_json(false);
    assert_eq!(a.to_string(), b.to_string());
    let keys: Vec<&str> = a.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["model", "delta", "bidegree", "system", "box", "margin", "dimension", "certification", "basis", "elapsed_ms"] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert_eq!(a["delta"], "1");
    assert_eq!(a["bidegree"], serde_json::json!([1, 1]));
    assert_eq!(a["certification"], "exact-decoupled");
    assert!(a["elapsed_ms"].is_null());
    let basis: Vec<Form> = a["basis"].as_array().unwrap().iter().map(|t| Form::parse(t.as_str().unwrap(), 2).unwrap()).collect();
    assert_eq!(basis.len(), 3);
    assert!(solve(&m, 1, 1, SystemKind::Bc, 3).to_json(true)["elapsed_ms"].is_u64());
}

#[test]
fn hyperelliptic_top_degree_needs_no_room() {
    let r = solve(&hyper(), 2, 2, SystemKind::Bc, 1);
    assert_eq!(r.margin, 2);
    assert_eq!(r.basis, vec![hyper().gen(&[1, 2], &[1, 2])]);
    assert!(r.basis[0].modes() == vec![ModeIndex::zero(4)]);
}
