use std::collections::BTreeMap;

use gup_core::model::{builtin, library};
use gup_core::number::{i_unit, real, rat};
use gup_core::operator::{build_position, OperatorExpr};
use gup_core::oracle::{cross_check, cross_check_claim, Evaluator, NumericInstance, TestFunction};
use gup_core::tensor::label;

#[test]
fn same_seed_same_instance() {
    let m = builtin("kempf-aniso").unwrap();
    assert_eq!(NumericInstance::instantiate(&m, 7), NumericInstance::instantiate(&m, 7));
    assert_ne!(NumericInstance::instantiate(&m, 7), NumericInstance::instantiate(&m, 8));
}

#[test]
fn symmetric_arrays() {
    let m = builtin("kempf-aniso").unwrap();
    let inst = NumericInstance::instantiate(&m, 3);
    for a in 0..3 {
        for b in 0..3 {
            assert_eq!(inst.component("beta", &[a, b]), inst.component("beta", &[b, a]));
        }
    }
}

#[test]
fn q_differentiates() {
    let m = builtin("baseline").unwrap();
    let inst = NumericInstance::instantiate(&m, 1);
    let point = [real(rat(1, 2)), real(rat(-1, 3)), real(rat(2, 5))];
    let ev = Evaluator::new(&inst, point.clone(), 1);
    let psi = TestFunction {
        terms: vec![([2, 0, 0], rat(1, 1)), ([0, 2, 0], rat(1, 1)), ([0, 0, 2], rat(1, 1))],
    }
    .jet(&point, 1);
    for (k, pk) in point.iter().enumerate() {
        let asg: BTreeMap<_, _> = [(label("i"), k)].into_iter().collect();
        let v = ev.apply(&OperatorExpr::q("i"), &psi, &asg).unwrap();
        assert_eq!(v.value(), &(i_unit() * real(rat(2, 1)) * pk));
    }
}

#[test]
fn canonical_pair_cross_checks() {
    let m = builtin("baseline").unwrap();
    let inst = NumericInstance::instantiate(&m, 11);
    let r = cross_check(&OperatorExpr::q("i"), &OperatorExpr::p("j"), &inst, 5).unwrap();
    assert!(r.passed, "{:?}", r.mismatch);
}

#[test]
fn position_commutators_cross_check() {
    for m in library() {
        let x = build_position(&m, "i", None).unwrap();
        let y = build_position(&m, "j", None).unwrap();
        for seed in 0..2 {
            let inst = NumericInstance::instantiate(&m, seed);
            let r = cross_check(&x, &y, &inst, 2).unwrap();
            assert!(r.passed, "{}: {:?}", m.name, r.mismatch);
        }
    }
}

#[test]
fn sign_mutant_is_caught() {
    let m = builtin("kempf-aniso").unwrap();
    let x = build_position(&m, "i", None).unwrap();
    let y = build_position(&m, "j", None).unwrap();
    let c = x.commutator(&y).unwrap();
    let mutant = c.neg();
    let inst = NumericInstance::instantiate(&m, 5);
    assert!(!cross_check_claim(&x, &y, &mutant, &inst, 3).unwrap().passed);
}
