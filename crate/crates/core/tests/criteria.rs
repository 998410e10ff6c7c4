use gup_core::criteria::*;
use gup_core::model::{builtin, parse_ansatz, parse_model, ModelSpec, LIBRARY_NAMES};
use gup_core::number::rat;
use gup_core::operator::{build_position, LogDerivative, OperatorExpr, Placement};
use gup_core::oracle::{cross_check_claim, nonzero_somewhere, NumericInstance};
use gup_core::tensor::TensorExpr;

fn m(name: &str) -> ModelSpec {
    builtin(name).unwrap()
}

fn ansatz<'a>(model: &'a ModelSpec, name: &str) -> &'a TransformAnsatz {
    model.ansatz(name).unwrap()
}

fn value(r: &CheckReport, k: &str) -> String {
    r.solution.get(k).cloned().unwrap_or_default()
}

#[test]
fn isotropic_radial_transform_keeps_xx() {
    let iso = m("isotropic-radial");
    let r = check_ansatz(&iso, &Target::Xx, ansatz(&iso, "radial"), &Mode::Exact).unwrap();
    assert_eq!(r.status, Status::Holds);
}

#[test]
fn h_model_power_family_breaks_xx() {
    let h = m("h-constant-c");
    let r = check_ansatz(&h, &Target::Xx, ansatz(&h, "c-power"), &Mode::Exact).unwrap();
    assert_eq!(r.status, Status::Fails);
    assert_ne!(r.residual, "0");
}

#[test]
fn h_model_first_order_poly_is_solvable() {
    let h = m("h-constant-c");
    let r = solve_report(&h, &Target::Xx, ansatz(&h, "poly-1"), &Mode::Order(1)).unwrap();
    assert_eq!(r.status, Status::Solved);
}

/// The combination c²p² − (p·c)² drops out of the xx residual, so a
/// basis containing both admits a nontrivial member.
#[test]
fn h_model_has_an_exact_xx_member_outside_the_no_go_family() {
    let h = m("h-constant-c");
    let a = parse_ansatz("poly(k1: (c[a]*p[a])^2, k2: c[a]*c[a]*p[b]*p[b])", &h.symbols).unwrap();
    let r = solve_report(&h, &Target::Xx, &a, &Mode::Exact).unwrap();
    assert_eq!(r.status, Status::Solved);
    let (k1, k2) = (value(&r, "k1"), value(&r, "k2"));
    assert_ne!(k1, "0");
    assert_eq!(format!("-{k1}").replace("--", ""), k2);
}

#[test]
fn f_inverse_compensates_full_swap() {
    let f = m("f-only-general");
    let r = check_ansatz(&f, &Target::Reorder(Placement::Left), ansatz(&f, "f-inverse"), &Mode::Exact).unwrap();
    assert_eq!(r.status, Status::Holds);
}

#[test]
fn h_model_reordering_fails_for_every_family() {
    let h = m("h-constant-c");
    for a in ["c-power", "poly-2"] {
        let r = check_ansatz(&h, &Target::Reorder(Placement::Left), ansatz(&h, a), &Mode::Exact).unwrap();
        assert_eq!(r.status, Status::Fails, "{a}");
    }
}

#[test]
fn g_model_reordering_is_compensated_at_every_depth() {
    let g = m("g-only-single");
    for r in 0..=2 {
        let rep = solve_report(&g, &Target::Reorder(Placement::Uniform(r)), ansatz(&g, "g-power"), &Mode::Exact).unwrap();
        assert_eq!(rep.status, Status::Solved, "depth {r}");
    }
}

#[test]
fn non_symmetric_g_anisotropy_is_rejected() {
    let g = m("g-nonsym");
    let r = check_ansatz(&g, &Target::Reorder(Placement::Left), ansatz(&g, "g-power"), &Mode::Exact).unwrap();
    assert_eq!(r.status, Status::Fails);
}

#[test]
fn undeformed_model_needs_no_transformation() {
    let b = m("baseline");
    let r = solve_report(&b, &Target::Reorder(Placement::Left), ansatz(&b, "p-power"), &Mode::Exact).unwrap();
    assert_eq!(r.status, Status::Solved);
    assert_eq!(value(&r, "n"), "0");
}

#[test]
fn intermediate_depths_of_single_term_f() {
    let f = m("f-only-single");
    let want = ["-1", "-1/2", "0"];
    for (r, w) in want.iter().enumerate() {
        let rep = solve_report(&f, &Target::Reorder(Placement::Uniform(r)), ansatz(&f, "f-power"), &Mode::Exact).unwrap();
        assert_eq!(value(&rep, "n"), *w, "depth {r}");
    }
}

#[test]
fn per_monomial_placement_must_match_monomials() {
    let f = m("f-only-single");
    let e = solve_report(&f, &Target::Reorder(Placement::PerMonomial(vec![0])), ansatz(&f, "f-power"), &Mode::Exact);
    assert!(e.is_err());
    let ok = solve_report(&f, &Target::Reorder(Placement::PerMonomial(vec![1, 0])), ansatz(&f, "f-power"), &Mode::Exact)
        .unwrap();
    assert_eq!(value(&ok, "n"), "-1/2");
}

#[test]
fn unintegrable_transform_is_an_error() {
    let f = m("f-only-general");
    let l = LogDerivative::new("j", f.parse_expr("alpha[a]*p[a]*beta[j,b]*alpha[b]").unwrap()).unwrap();
    assert!(matches!(check_xx_invariance(&f, &l, &Mode::Exact), Err(CriteriaError::NotIntegrable)));
}

#[test]
fn symmetricity_examples() {
    let base = m("baseline");
    assert_eq!(check_symmetricity(&base, None, false).unwrap().status, Status::Holds);
    assert_eq!(check_symmetricity(&base, None, true).unwrap().status, Status::Holds);
    assert_eq!(check_symmetricity(&m("kempf-aniso"), None, false).unwrap().status, Status::Holds);
    let f = m("f-only-single");
    let trivial = check_symmetricity(&f, None, true).unwrap();
    assert_eq!(trivial.status, Status::Fails);
    assert_eq!(trivial.residual, f.f.derive("i").unwrap().to_string());
    assert_eq!(check_symmetricity(&f, Some("f-power"), false).unwrap().status, Status::Holds);
    assert!(check_symmetricity(&m("h-constant-c"), Some("poly-1"), false).is_err());
}

#[test]
fn commutativity_examples() {
    let c = m("commutative");
    assert_eq!(check_commutativity(&c, &Mode::Exact).unwrap().status, Status::Holds);
    let derived = commutative_model(&m("f-only-single")).unwrap();
    assert_eq!(check_commutativity(&derived, &Mode::Exact).unwrap().status, Status::Holds);
    let iso = commutative_model(&m("isotropic-radial")).unwrap();
    assert_eq!(check_commutativity(&iso, &Mode::Exact).unwrap().status, Status::Holds);
    let k = m("kempf-aniso");
    assert_eq!(check_commutativity(&k, &Mode::Order(1)).unwrap().status, Status::Holds);
    assert_eq!(check_commutativity(&k, &Mode::Exact).unwrap().status, Status::Fails);
}

#[test]
fn commutative_g_needs_invertible_denominator() {
    let f = m("baseline").parse_expr("p[a]*p[a]").unwrap();
    assert!(matches!(commutative_g_from_f(&f, "i"), Err(CriteriaError::Precondition(_))));
}

#[test]
fn translation_generator_examples() {
    let k = m("kempf-aniso");
    assert_eq!(check_translation_generator(&k, &Mode::Order(1)).unwrap().status, Status::Holds);
    assert_eq!(check_translation_generator(&k, &Mode::Order(2)).unwrap().status, Status::Fails);
    assert_eq!(check_translation_generator(&m("baseline"), &Mode::Exact).unwrap().status, Status::Holds);
    assert!(check_translation_generator(&m("kappa-fg"), &Mode::Order(1)).is_err());
}

#[test]
fn angular_momentum_for_f_models() {
    for name in ["f-only-general", "f-only-single", "isotropic-kempf", "isotropic-radial"] {
        for r in check_angular_momentum(&m(name)).unwrap() {
            assert_eq!(r.status, Status::Holds, "{name}: {} {}", r.check, r.residual);
        }
    }
}

#[test]
fn dual_path_agrees_across_the_library() {
    for name in LIBRARY_NAMES {
        let model = m(name);
        let mut transforms = vec![LogDerivative::none("j")];
        for a in &model.ansatze {
            if a.unknowns().is_empty() {
                transforms.push(a.log_derivative("j").unwrap());
            } else {
                let ones = a.unknowns().iter().map(|k| (k.name.to_string(), rat(1, 1))).collect();
                transforms.push(a.instantiate("j", &ones).unwrap());
            }
        }
        for l in &transforms {
            for target in [Target::Xx, Target::Reorder(Placement::Left), Target::Reorder(Placement::Uniform(1))] {
                check_transform(&model, &target, l, &Mode::Exact)
                    .unwrap_or_else(|e| panic!("{name} {}: {e}", target.check_name()));
            }
        }
    }
}

#[test]
fn exact_holds_imply_truncated_holds() {
    for name in ["f-only-general", "kempf-aniso", "g-only-single", "kappa-fg-alpha"] {
        let model = m(name);
        let a = model.default_ansatz().unwrap();
        let sol = solve_transform(&model, &Target::Reorder(Placement::Left), a, &Mode::Exact).unwrap().unwrap();
        for k in 0..=3 {
            let r = check_transform(&model, &Target::Reorder(Placement::Left), &sol.log_derivative, &Mode::Order(k)).unwrap();
            assert_eq!(r.status, Status::Holds, "{name} order {k}");
        }
    }
}

#[test]
fn failing_residuals_are_numerically_nonzero() {
    let cases = [
        ("h-constant-c", Target::Reorder(Placement::Left)),
        ("h-rank-2-d", Target::Reorder(Placement::Left)),
        ("f-only-general", Target::Reorder(Placement::Uniform(1))),
        ("g-nonsym", Target::Xx),
    ];
    for (name, target) in cases {
        let model = m(name);
        let a = model.default_ansatz().unwrap();
        let ones = a.unknowns().iter().map(|k| (k.name.to_string(), rat(1, 1))).collect();
        let l = a.instantiate("j", &ones).unwrap();
        let rep = check_transform(&model, &target, &l, &Mode::Exact).unwrap();
        assert_eq!(rep.status, Status::Fails, "{name}");
        let r = residual(&model, &target, &l).unwrap();
        let inst = NumericInstance::instantiate(&model, 11);
        assert!(nonzero_somewhere(&r, &inst, 4).unwrap(), "{name}");
    }
}

fn op(model: &ModelSpec, s: &str) -> OperatorExpr {
    OperatorExpr::from(model.parse_expr(s).unwrap())
}

/// The closed-form commutators, rebuilt here from the DSL and composed by
/// the numeric oracle on three seeds.
#[test]
fn closed_form_commutators_pass_the_oracle() {
    let f = m("f-only-general");
    let df = |a: &str| f.f.derive(a).unwrap();
    let xf = |i: &str| build_position(&f, i, None).unwrap();
    let ih = TensorExpr::ihbar();
    let f_rhs = xf("j")
        .left_mul(&ih.mul(&df("i")).unwrap())
        .unwrap()
        .sub(&xf("i").left_mul(&ih.mul(&df("j")).unwrap()).unwrap())
        .unwrap();

    let g = m("g-only-single");
    let xg = |i: &str| build_position(&g, i, None).unwrap();
    let g_rhs = xg("i")
        .mul(&op(&g, "im*hbar*gb[j,a]*p[a]"))
        .unwrap()
        .sub(&xg("j").mul(&op(&g, "im*hbar*gb[i,a]*p[a]")).unwrap())
        .unwrap();

    for seed in [1, 2, 3] {
        for (model, x, rhs) in [(&f, &xf as &dyn Fn(&str) -> OperatorExpr, &f_rhs), (&g, &xg, &g_rhs)] {
            let inst = NumericInstance::instantiate(model, seed);
            let cc = cross_check_claim(&x("i"), &x("j"), rhs, &inst, 2).unwrap();
            assert!(cc.passed, "{} seed {seed}: {:?}", model.name, cc.mismatch);
        }
    }
}

#[test]
fn inline_model_checks() {
    let src = r#"model "single-alpha" {
  dim 3
  tensor alpha rank 1
  scalaratom s = 1 + alpha[a]*p[a]
  f = 1 + alpha[a]*p[a]
  ansatz "a-power" power(n: s)
}"#;
    let model = parse_model(src).unwrap();
    let r = solve_report(&model, &Target::Reorder(Placement::Left), ansatz(&model, "a-power"), &Mode::Exact).unwrap();
    assert_eq!(value(&r, "n"), "-1");
}
