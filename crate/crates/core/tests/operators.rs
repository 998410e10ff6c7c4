use gup_core::model::{builtin, parse_model, ModelSpec};
use gup_core::operator::{build_position, reorder_position, LogDerivative, OperatorExpr, Placement};
use gup_core::tensor::TensorExpr;

fn op(m: &ModelSpec, s: &str) -> OperatorExpr {
    OperatorExpr::from(m.parse_expr(s).unwrap_or_else(|e| panic!("{s}: {e}")))
}

fn same(a: &OperatorExpr, b: &OperatorExpr) -> bool {
    a.sub(b).unwrap().tensor().is_zero().unwrap()
}

fn fmodel() -> ModelSpec {
    parse_model(
        "model \"f\" {\n dim 3\n tensor alpha rank 1\n tensor beta rank 2 symmetric\n f = 1 + alpha[a]*p[a] + p[a]*beta[a,b]*p[b]\n}",
    )
    .unwrap()
}

#[test]
fn canonical_pair() {
    let c = OperatorExpr::q("i").commutator(&OperatorExpr::p("j")).unwrap();
    assert_eq!(c.to_string(), "im*hbar*delta[i,j]");
}

#[test]
fn q_through_p_squared() {
    let m = fmodel();
    let lhs = OperatorExpr::q("i").mul(&op(&m, "p[a]*p[a]")).unwrap();
    assert!(same(&lhs, &op(&m, "p[a]*p[a]*q[i] + 2*im*hbar*p[i]")));
}

#[test]
fn self_commutator_vanishes() {
    let m = fmodel();
    let a = op(&m, "p[a]*beta[a,b]*q[b] + alpha[a]*q[a]*p[b]*q[b]");
    assert!(a.commutator(&a).unwrap().is_empty());
}

#[test]
fn baseline_position_is_q() {
    let m = builtin("baseline").unwrap();
    let x = build_position(&m, "i", None).unwrap();
    assert_eq!(x.to_string(), "q[i]");
}

#[test]
fn f_model_position() {
    let m = fmodel();
    let x = build_position(&m, "i", None).unwrap();
    let expect = op(
        &m,
        "(1 + alpha[a]*p[a] + p[a]*beta[a,b]*p[b])*q[i] + 1/2*im*hbar*(alpha[i] + 2*beta[i,a]*p[a])",
    );
    assert!(same(&x, &expect), "{x}");
    let c = x.coefficient_of(&["j"]).unwrap();
    let want = m.parse_expr("(1 + alpha[a]*p[a] + p[a]*beta[a,b]*p[b])*delta[i,j]").unwrap();
    assert!(c.sub(&want).unwrap().is_zero().unwrap(), "{c}");
}

#[test]
fn g_model_position() {
    let m = builtin("g-only-single").unwrap();
    let x = build_position(&m, "i", None).unwrap();
    // d = 2: (d + 2)/2 = 2
    let expect = op(&m, "q[i] + gb[i,a]*p[a]*(p[b]*q[b] + 2*im*hbar)");
    assert!(same(&x, &expect), "{x}");
}

#[test]
fn transform_shifts_q() {
    let m = fmodel();
    let l = LogDerivative::new("j", m.parse_expr("alpha[j] + beta[j,a]*p[a]").unwrap()).unwrap();
    let q = OperatorExpr::q("i").apply_transform(&l).unwrap();
    assert!(same(&q, &op(&m, "q[i] - im*hbar*(alpha[i] + beta[i,a]*p[a])")));
    let p = OperatorExpr::p("i").apply_transform(&l).unwrap();
    assert_eq!(p, OperatorExpr::p("i"));
    let x = build_position(&m, "i", None).unwrap().apply_transform(&l).unwrap();
    assert!(same(&x, &build_position(&m, "i", Some(&l)).unwrap()));
    assert!(l.is_integrable().unwrap());
    let bad = LogDerivative::new("j", m.parse_expr("beta[j,a]*alpha[a]*alpha[b]*p[b]").unwrap()).unwrap();
    assert!(!bad.is_integrable().unwrap());
}

#[test]
fn xp_commutator_is_f() {
    for m in gup_core::model::library() {
        let x = build_position(&m, "i", None).unwrap();
        let c = x.commutator(&OperatorExpr::p("j")).unwrap();
        let want = TensorExpr::ihbar().mul(&m.f_matrix("i", "j").unwrap()).unwrap();
        assert!(c.tensor().sub(&want).unwrap().is_zero().unwrap(), "{}: {c}", m.name);
    }
}

#[test]
fn left_placement_adds_gradient() {
    let m = fmodel();
    let x = reorder_position(&m, "i", &Placement::Left).unwrap();
    let base = build_position(&m, "i", None).unwrap();
    let grad = op(&m, "im*hbar*(alpha[i] + 2*beta[i,a]*p[a])");
    assert!(same(&x, &base.add(&grad).unwrap()), "{x}");
    let right = reorder_position(&m, "i", &Placement::Right).unwrap();
    assert_eq!(right, base);
    // q between the two momenta of p.beta.p
    let mid = reorder_position(&m, "i", &Placement::Uniform(1)).unwrap();
    let want = base.add(&op(&m, "im*hbar*beta[i,a]*p[a]")).unwrap();
    assert!(same(&mid, &want), "{mid}");
}
