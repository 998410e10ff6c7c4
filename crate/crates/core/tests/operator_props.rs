use proptest::prelude::*;

use gup_core::model::{parse_model, ModelSpec};
use gup_core::operator::{LogDerivative, OperatorExpr};
use gup_core::oracle::{cross_check, NumericInstance};

const SRC: &str = r#"model "ops" {
  dim 3
  tensor alpha rank 1
  tensor beta rank 2 symmetric
  scalaratom w = 1 + alpha[a]*p[a]
  f = 1
}"#;

const SCALARS: &[&str] = &["alpha[a]*p[a]", "p[a]*beta[a,b]*p[b]", "p[a]*p[a]", "3", "-1", "1/w"];
const VECTORS: &[&str] = &["p[i]", "alpha[i]", "beta[i,a]*p[a]"];

fn model() -> ModelSpec {
    parse_model(SRC).unwrap()
}

/// `s0 + s1 (v·q)`, optionally with a second `q`.
fn operator_src() -> impl Strategy<Value = String> {
    (0..SCALARS.len(), 0..SCALARS.len(), 0..VECTORS.len(), prop::bool::ANY).prop_map(|(a, b, v, two)| {
        let mut s = format!("({}) + ({})*{}*q[i]", SCALARS[a], SCALARS[b], VECTORS[v]);
        if two {
            s.push_str(" + alpha[i]*q[i]*p[j]*q[j]");
        }
        s
    })
}

fn op(m: &ModelSpec, s: &str) -> OperatorExpr {
    OperatorExpr::from(m.parse_expr(s).unwrap_or_else(|e| panic!("{s}: {e}")))
}

fn zero(a: &OperatorExpr) -> bool {
    a.tensor().is_zero().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn commutator_is_antisymmetric(a in operator_src(), b in operator_src()) {
        let m = model();
        let (x, y) = (op(&m, &a), op(&m, &b));
        prop_assert!(zero(&x.commutator(&y).unwrap().add(&y.commutator(&x).unwrap()).unwrap()));
    }

    #[test]
    fn jacobi_identity(a in operator_src(), b in operator_src(), c in operator_src()) {
        let m = model();
        let (x, y, z) = (op(&m, &a), op(&m, &b), op(&m, &c));
        let j = x.commutator(&y.commutator(&z).unwrap()).unwrap()
            .add(&y.commutator(&z.commutator(&x).unwrap()).unwrap()).unwrap()
            .add(&z.commutator(&x.commutator(&y).unwrap()).unwrap()).unwrap();
        prop_assert!(zero(&j));
    }

    #[test]
    fn product_associates(a in operator_src(), b in operator_src(), c in operator_src()) {
        let m = model();
        let (x, y, z) = (op(&m, &a), op(&m, &b), op(&m, &c));
        let l = x.mul(&y).unwrap().mul(&z).unwrap();
        let r = x.mul(&y.mul(&z).unwrap()).unwrap();
        prop_assert!(zero(&l.sub(&r).unwrap()));
    }

    #[test]
    fn transform_is_multiplicative(a in operator_src(), b in operator_src(), n in -2i64..=2) {
        let m = model();
        let (x, y) = (op(&m, &a), op(&m, &b));
        let l = LogDerivative::new("j", m.parse_expr(&format!("{n}*alpha[j]/w")).unwrap()).unwrap();
        let lhs = x.mul(&y).unwrap().apply_transform(&l).unwrap();
        let rhs = x.apply_transform(&l).unwrap().mul(&y.apply_transform(&l).unwrap()).unwrap();
        prop_assert!(zero(&lhs.sub(&rhs).unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn oracle_agrees_with_symbolic_commutator(a in operator_src(), b in operator_src(), seed in 0u64..10_000) {
        let m = model();
        let inst = NumericInstance::instantiate(&m, seed);
        let cc = cross_check(&op(&m, &a), &op(&m, &b), &inst, 2).unwrap();
        prop_assert!(cc.passed, "{:?}", cc.mismatch);
    }
}
