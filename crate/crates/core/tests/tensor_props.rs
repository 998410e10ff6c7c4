use num_traits::ToPrimitive;
use proptest::prelude::*;

use gup_core::model::{parse_model, render_model, ModelSpec};
use gup_core::number::{rat, real, Coeff};
use gup_core::oracle::{Evaluator, NumericInstance, DIM};
use gup_core::tensor::{Grading, TensorExpr};

const SRC: &str = r#"model "props" {
  dim 3
  tensor alpha rank 1
  tensor beta rank 2 symmetric order 2
  tensor gamma rank 2
  tensor s rank 0
  scalaratom w = 1 + alpha[a]*p[a]
  f = 1
}"#;

fn model() -> ModelSpec {
    parse_model(SRC).unwrap()
}

/// Relative tolerance of the central-difference comparison.
const FD_TOL: f64 = 1e-9;

const SCALARS: &[&str] = &[
    "alpha[a]*p[a]",
    "p[a]*beta[a,b]*p[b]",
    "p[a]*p[a]",
    "gamma[a,b]*alpha[a]*p[b]",
    "s",
    "2",
    "-3",
    "1/w",
    "hbar",
];

const VECTORS: &[&str] = &["p[i]", "alpha[i]", "beta[i,a]*p[a]", "gamma[a,i]*p[a]", "gamma[i,a]*alpha[a]"];

fn product(idx: Vec<usize>) -> String {
    idx.iter().map(|k| format!("({})", SCALARS[*k])).collect::<Vec<_>>().join("*")
}

fn scalar_src() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::collection::vec(0..SCALARS.len(), 1..=3), 1..=3)
        .prop_map(|terms| terms.into_iter().map(product).collect::<Vec<_>>().join(" + "))
}

fn vector_src() -> impl Strategy<Value = String> {
    (scalar_src(), 0..VECTORS.len()).prop_map(|(s, v)| format!("({s})*{}", VECTORS[v]))
}

fn parse(m: &ModelSpec, s: &str) -> TensorExpr {
    m.parse_expr(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn eq(a: &TensorExpr, b: &TensorExpr) -> bool {
    a.sub(b).unwrap().is_zero().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sum_and_product_commute(a in scalar_src(), b in scalar_src()) {
        let m = model();
        let (x, y) = (parse(&m, &a), parse(&m, &b));
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
    }

    #[test]
    fn product_associates(a in scalar_src(), b in scalar_src(), c in vector_src()) {
        let m = model();
        let (x, y, z) = (parse(&m, &a), parse(&m, &b), parse(&m, &c));
        let l = x.mul(&y).unwrap().mul(&z).unwrap();
        let r = x.mul(&y.mul(&z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn render_parses_back(a in vector_src()) {
        let m = model();
        let x = parse(&m, &a);
        let again = parse(&m, &x.to_string());
        prop_assert_eq!(again, x);
    }

    #[test]
    fn leibniz_rule(a in scalar_src(), b in vector_src()) {
        let m = model();
        let (x, y) = (parse(&m, &a), parse(&m, &b));
        let lhs = x.mul(&y).unwrap().derive("k").unwrap();
        let rhs = x.derive("k").unwrap().mul(&y).unwrap().add(&x.mul(&y.derive("k").unwrap()).unwrap()).unwrap();
        prop_assert!(eq(&lhs, &rhs));
    }

    #[test]
    fn partials_commute(a in vector_src()) {
        let m = model();
        let x = parse(&m, &a);
        let kl = x.derive("k").unwrap().derive("l").unwrap();
        let lk = x.derive("l").unwrap().derive("k").unwrap();
        prop_assert!(eq(&kl, &lk));
    }

    #[test]
    fn truncation_is_a_ring_morphism(a in scalar_src(), b in scalar_src(), k in 0i64..3) {
        let m = model();
        let (x, y) = (parse(&m, &a), parse(&m, &b));
        let t = |e: &TensorExpr| e.truncate(k, Grading::Declared).unwrap();
        prop_assert_eq!(t(&x.mul(&y).unwrap()), t(&t(&x).mul(&t(&y)).unwrap()));
        prop_assert_eq!(t(&x.add(&y).unwrap()), t(&t(&x).add(&t(&y)).unwrap()));
    }

    #[test]
    fn derivative_matches_central_difference(a in scalar_src(), seed in 0u64..1000, k in 0usize..DIM) {
        let m = model();
        let x = parse(&m, &a);
        let dx = x.derive("k").unwrap();
        let inst = NumericInstance::instantiate(&m, seed);
        let base = [real(rat(1, 3)), real(rat(-2, 7)), real(rat(1, 5))];
        let h = rat(1, 1_000_000);
        let at = |shift: Coeff| {
            let mut pt = base.clone();
            pt[k] = &pt[k] + shift;
            Evaluator::new(&inst, pt, 0).scalar(&x).unwrap().value().clone()
        };
        let fd = (at(real(h.clone())) - at(real(-h.clone()))) / real(&h * rat(2, 1));
        let assign = [(gup_core::tensor::label("k"), k)].into_iter().collect();
        let exact = Evaluator::new(&inst, base.clone(), 0).tensor(&dx, &assign).unwrap().value().clone();
        let err = (&fd - &exact).norm_sqr().to_f64().unwrap().sqrt();
        let scale = 1.0 + exact.norm_sqr().to_f64().unwrap().sqrt();
        prop_assert!(err <= FD_TOL * scale, "fd {} exact {} err {}", fd, exact, err);
    }
}

#[test]
fn model_source_round_trips() {
    let m = model();
    assert_eq!(parse_model(&render_model(&m)).unwrap(), m);
}
